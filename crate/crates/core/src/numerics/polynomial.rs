//! Dense complex polynomials and a simultaneous (Aberth–Ehrlich) root solver.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Leading coefficients at or below this magnitude are treated as zero.
pub const MIN_LEADING: f64 = 1e-300;

/// Default residual tolerance for [`solve_roots`].
pub const DEFAULT_TOL: f64 = 1e-10;

const MAX_ITERATIONS: usize = 500;

// Angular offset of the initial approximants, in radians. Irrational so that
// no starting point lands on a symmetry axis of a real or rotationally
// symmetric polynomial.
const START_ANGLE: f64 = 0.618_033_988_749_894_8;

/// Coefficients are stored constant term first.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        match coeffs.last() {
            None => Err(Error::InvalidArgument("empty coefficient list".into())),
            Some(lead) if lead.norm() <= MIN_LEADING => Err(Error::InvalidArgument(format!(
                "leading coefficient {lead} is zero"
            ))),
            Some(_) => Ok(Self { coeffs }),
        }
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= r * c;
            }
            coeffs = next;
        }
        Self { coeffs }
    }

    /// `z^m - w z^d + lambda`: clearing the denominator in `z^n + lambda/z^d = w`.
    pub fn preimage_trinomial(m: usize, d: usize, w: Complex64, lambda: Complex64) -> Self {
        debug_assert!(d < m);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); m + 1];
        coeffs[0] = lambda;
        coeffs[d] = -w;
        coeffs[m] = Complex64::new(1.0, 0.0);
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative by a single Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Horner evaluation with |coefficients| at |z|: the scale of the
    /// rounding error committed by [`Polynomial::eval`].
    fn abs_eval(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.norm() == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A root with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootCluster {
    pub center: Complex64,
    pub multiplicity: usize,
}

/// All `deg` roots of `p`, counted with multiplicity.
///
/// Approximants that end up within `tol^(1/k)` of each other (relative to
/// `1 + |z|`) are merged into a `k`-fold root located at their centroid, and
/// the centroid is reported `k` times.
pub fn solve_roots(p: &Polynomial, tol: f64) -> Result<Vec<Complex64>> {
    Ok(solve_root_clusters(p, tol)?
        .into_iter()
        .flat_map(|c| std::iter::repeat_n(c.center, c.multiplicity))
        .collect())
}

/// Like [`solve_roots`] but keeps clusters together.
pub fn solve_root_clusters(p: &Polynomial, tol: f64) -> Result<Vec<RootCluster>> {
    if !(tol > 0.0 && tol <= 1e-6) {
        return Err(Error::InvalidArgument(format!(
            "tolerance {tol} outside (0, 1e-6]"
        )));
    }
    if p.degree() == 0 {
        return Err(Error::InvalidArgument(format!(
            "cannot solve degree-0 polynomial {p}"
        )));
    }
    let roots = aberth(p, tol)?;
    Ok(cluster(&roots, tol))
}

fn aberth(p: &Polynomial, tol: f64) -> Result<Vec<Complex64>> {
    let deg = p.degree();
    let lead = p.coeffs[deg];
    if deg == 1 {
        return Ok(vec![-p.coeffs[0] / lead]);
    }

    // Cauchy bound of the monic normalisation.
    let radius = 1.0
        + p.coeffs[..deg]
            .iter()
            .map(|c| (c / lead).norm())
            .fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(radius, TAU * k as f64 / deg as f64 + START_ANGLE))
        .collect();

    let residual_bound = tol * (1.0 + p.max_coeff_norm());
    let mut done = vec![false; deg];
    for _ in 0..MAX_ITERATIONS {
        for i in 0..deg {
            if done[i] {
                continue;
            }
            let zi = z[i];
            let (val, der) = p.eval_with_derivative(zi);
            // At the rounding floor further updates are noise.
            if val.norm() <= 4.0 * f64::EPSILON * p.abs_eval(zi.norm()) {
                done[i] = true;
                continue;
            }
            let ratio = val / der;
            let repulsion: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| {
                    let diff = zi - z[j];
                    if diff.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        diff.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                // Derivative vanished: nudge off the stationary point.
                z[i] += Complex64::new(1e-8, 1e-8) * (1.0 + zi.norm());
                continue;
            }
            z[i] = zi - step;
            if step.norm() <= 4.0 * f64::EPSILON * (1.0 + z[i].norm()) {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            break;
        }
    }

    let converged = z.iter().all(|&zi| {
        let r = p.eval(zi).norm();
        r <= residual_bound || r <= 8.0 * f64::EPSILON * p.abs_eval(zi.norm())
    });
    if converged {
        Ok(z)
    } else {
        Err(Error::NonConvergence {
            polynomial: p.to_string(),
            iterations: MAX_ITERATIONS,
        })
    }
}

fn cluster(roots: &[Complex64], tol: f64) -> Vec<RootCluster> {
    let mut clusters: Vec<(Complex64, usize)> = roots.iter().map(|&r| (r, 1)).collect();
    loop {
        let mut merge = None;
        'search: for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let (ca, ka) = clusters[a];
                let (cb, kb) = clusters[b];
                let k = (ka + kb) as f64;
                let scale = 1.0 + 0.5 * (ca.norm() + cb.norm());
                if (ca - cb).norm() < tol.powf(1.0 / k) * scale {
                    merge = Some((a, b));
                    break 'search;
                }
            }
        }
        let Some((a, b)) = merge else { break };
        let (cb, kb) = clusters.swap_remove(b);
        let (ca, ka) = clusters[a];
        let k = ka + kb;
        clusters[a] = ((ca * ka as f64 + cb * kb as f64) / k as f64, k);
    }
    clusters
        .into_iter()
        .map(|(center, multiplicity)| RootCluster {
            center,
            multiplicity,
        })
        .collect()
}
