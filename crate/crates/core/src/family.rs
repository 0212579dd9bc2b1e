//! The family `F(z) = z^n + lambda/z^d` and its critical structure.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{solve_root_clusters, Polynomial, DEFAULT_TOL};

/// Below this modulus `z` is treated as the pole at the origin.
pub const POLE_RADIUS: f64 = 1e-150;

pub fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Checks `n, d >= 2`, `1/n + 1/d < 1` and `n != d`.
pub fn check_admissible(n: u32, d: u32) -> Result<()> {
    if n < 2 || d < 2 {
        return Err(Error::Inadmissible(format!(
            "n = {n}, d = {d}: both exponents must be at least 2"
        )));
    }
    if n == d {
        return Err(Error::Inadmissible(format!(
            "n = d = {n}: the construction assumes n != d"
        )));
    }
    // 1/n + 1/d < 1  <=>  n + d < n d
    if n + d >= n * d {
        return Err(Error::Inadmissible(format!(
            "n = {n}, d = {d} violate 1/n + 1/d < 1"
        )));
    }
    Ok(())
}

/// `(n, d, lambda)` together with the argument branch `psi` used for every
/// fractional power of `lambda`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapParams {
    n: u32,
    d: u32,
    lambda: Complex64,
    psi: f64,
}

impl MapParams {
    /// Uses the principal argument `psi in (-pi, pi]`.
    pub fn new(n: u32, d: u32, lambda: Complex64) -> Result<Self> {
        check_admissible(n, d)?;
        if !(lambda.norm() > 0.0) || !lambda.re.is_finite() || !lambda.im.is_finite() {
            return Err(Error::Inadmissible(format!("lambda = {lambda} must be nonzero")));
        }
        let mut psi = lambda.arg();
        if psi <= -PI {
            psi = PI;
        }
        Ok(Self { n, d, lambda, psi })
    }

    /// `lambda = modulus * e^{i psi}` keeping the given branch. Accepts
    /// `psi in [-pi, pi]`, so both sides of the negative real axis can be
    /// addressed continuously.
    pub fn from_polar(n: u32, d: u32, modulus: f64, psi: f64) -> Result<Self> {
        check_admissible(n, d)?;
        if !(modulus > 0.0 && modulus.is_finite()) {
            return Err(Error::Inadmissible(format!("|lambda| = {modulus} must be positive")));
        }
        if !(-PI..=PI).contains(&psi) {
            return Err(Error::InvalidArgument(format!("psi = {psi} outside [-pi, pi]")));
        }
        Ok(Self {
            n,
            d,
            lambda: Complex64::from_polar(modulus, psi),
            psi,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// Degree `n + d`.
    pub fn m(&self) -> u32 {
        self.n + self.d
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    /// Primitive `m`-th root of unity `e^{2 pi i/m}`.
    pub fn nu(&self) -> Complex64 {
        Complex64::from_polar(1.0, TAU / self.m() as f64)
    }

    pub fn gcd(&self) -> u32 {
        gcd(self.n, self.d)
    }

    /// `m / gcd(n, d)`, the number of distinct critical values.
    pub fn g(&self) -> u32 {
        self.m() / self.gcd()
    }

    fn scaled_modulus(&self) -> f64 {
        self.d as f64 * self.lambda.norm() / self.n as f64
    }

    /// Radius `(d|lambda|/n)^{1/m}` of the circle holding the free critical
    /// points.
    pub fn critical_radius(&self) -> f64 {
        self.scaled_modulus().powf(1.0 / self.m() as f64)
    }

    /// Radius `(1/2)(d|lambda|/n)^{1/d}` of the circle mu.
    pub fn mu_radius(&self) -> f64 {
        0.5 * self.scaled_modulus().powf(1.0 / self.d as f64)
    }

    pub fn critical_point(&self) -> Complex64 {
        Complex64::from_polar(self.critical_radius(), self.psi / self.m() as f64)
    }

    pub fn critical_value(&self) -> Complex64 {
        let m = self.m() as f64;
        let n = self.n as f64;
        Complex64::from_polar(
            m / self.d as f64 * self.scaled_modulus().powf(n / m),
            n * self.psi / m,
        )
    }

    #[inline]
    pub fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        z.powu(self.n) + self.lambda / z.powu(self.d)
    }

    pub fn eval_map(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() < POLE_RADIUS {
            return Err(Error::Pole(z));
        }
        Ok(self.eval_unchecked(z))
    }

    pub fn eval_derivative(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() < POLE_RADIUS {
            return Err(Error::Pole(z));
        }
        let (n, d) = (self.n as f64, self.d as f64);
        Ok(n * z.powu(self.n - 1) - d * self.lambda / z.powu(self.d + 1))
    }

    pub fn critical_data(&self) -> CriticalData {
        let m = self.m() as usize;
        let nu = self.nu();
        let c = self.critical_point();
        let v = self.critical_value();
        let minus_lambda = -self.lambda;
        let p = Complex64::from_polar(
            minus_lambda.norm().powf(1.0 / m as f64),
            minus_lambda.arg() / m as f64,
        );
        let step = nu.powu(self.gcd());
        CriticalData {
            c_lambda: c,
            critical_points: (0..m).map(|j| c * nu.powu(j as u32)).collect(),
            v_lambda: v,
            critical_values: (0..self.g()).map(|k| v * step.powu(k)).collect(),
            prepoles: (0..m).map(|j| p * nu.powu(j as u32)).collect(),
        }
    }

    /// `|F(nu z) - nu^n F(z)|`, which vanishes identically.
    pub fn check_rotational_symmetry(&self, z: Complex64) -> Result<f64> {
        let nu = self.nu();
        let lhs = self.eval_map(nu * z)?;
        let rhs = nu.powu(self.n) * self.eval_map(z)?;
        Ok((lhs - rhs).norm())
    }

    /// The `m` solutions of `F(z) = w` with multiplicity, from the roots of
    /// `z^m - w z^d + lambda`. Simple roots are polished by Newton steps on
    /// `F` itself.
    pub fn preimages(&self, w: Complex64) -> Result<Vec<Complex64>> {
        self.preimages_with_tol(w, DEFAULT_TOL)
    }

    pub fn preimages_with_tol(&self, w: Complex64, tol: f64) -> Result<Vec<Complex64>> {
        let poly = Polynomial::preimage_trinomial(self.m() as usize, self.d as usize, w, self.lambda);
        let mut out = Vec::with_capacity(self.m() as usize);
        for cluster in solve_root_clusters(&poly, tol)? {
            let mut z = cluster.center;
            if cluster.multiplicity == 1 {
                for _ in 0..2 {
                    let f = self.eval_unchecked(z) - w;
                    let df = self.eval_derivative(z)?;
                    let next = z - f / df;
                    if !next.re.is_finite() || !next.im.is_finite() {
                        break;
                    }
                    z = next;
                }
            }
            out.extend(std::iter::repeat_n(z, cluster.multiplicity));
        }
        Ok(out)
    }
}

/// Free critical points, critical values and prepoles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalData {
    pub c_lambda: Complex64,
    /// `c_lambda * nu^j`, `j = 0..m`.
    pub critical_points: Vec<Complex64>,
    pub v_lambda: Complex64,
    /// The `m / gcd(n, d)` distinct values `F(c_j) = v_lambda * nu^{n j}`,
    /// listed as `v_lambda * nu^{gcd * k}`.
    pub critical_values: Vec<Complex64>,
    /// `p_lambda * nu^j` with `p_lambda` the principal `m`-th root of `-lambda`.
    pub prepoles: Vec<Complex64>,
}
