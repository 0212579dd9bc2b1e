//! The parameter rectangle `W`, the circles and preimage curves in the
//! dynamical plane, and the regions `V'`, `U-hat`, `U-hat'` together with
//! the older `U'`, `U` construction.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{check_admissible, MapParams};
use crate::numerics::{
    continue_roots, curve_distance, extract_contour_with, hausdorff_distance, winding_number,
    wrap_angle, ContinuationOptions, ContourOptions, Curve, Polynomial, Rect, DEFAULT_TOL,
};

pub const MAX_HALVINGS: u32 = 40;
const BISECTION_STEPS: usize = 200;
// Relative slack for deciding whether a parameter lies in the closure of W.
const W_SLACK: f64 = 1e-12;

/// The polar rectangle `r_inner <= |lambda| <= r_outer`,
/// `|Arg lambda| <= pi/(n-1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamRectangle {
    pub n: u32,
    pub d: u32,
    pub r_inner: f64,
    pub r_outer: f64,
    pub arg_min: f64,
    pub arg_max: f64,
}

pub fn build_w(n: u32, d: u32) -> Result<ParamRectangle> {
    check_admissible(n, d).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let (nf, df) = (n as f64, d as f64);
    let m = nf + df;
    let r_inner = nf / df * (df / (2.0 * m)).powf(m * df / (nf * df - m));
    let r_outer = nf / df * (2.0 * df / m).powf(m / nf);
    let half = PI / (nf - 1.0);
    Ok(ParamRectangle {
        n,
        d,
        r_inner,
        r_outer,
        arg_min: -half,
        arg_max: half,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundarySegment {
    OuterArc,
    UpperRay,
    InnerArc,
    LowerRay,
}

impl BoundarySegment {
    pub fn is_radial(self) -> bool {
        matches!(self, Self::UpperRay | Self::LowerRay)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BoundaryPoint {
    pub params: MapParams,
    pub segment: BoundarySegment,
}

impl ParamRectangle {
    /// Geometric-mean radius on the positive real axis.
    pub fn center(&self) -> MapParams {
        MapParams::from_polar(self.n, self.d, (self.r_inner * self.r_outer).sqrt(), 0.0)
            .expect("W is built from admissible exponents")
    }

    pub fn contains_closure(&self, lambda: Complex64) -> bool {
        let r = lambda.norm();
        r >= self.r_inner * (1.0 - W_SLACK)
            && r <= self.r_outer * (1.0 + W_SLACK)
            && lambda.arg().abs() <= self.arg_max + W_SLACK
    }

    /// `grid x grid` cell-centred parameters, logarithmic in the radius and
    /// linear in the argument. Every point is interior. Ordered by radius,
    /// then argument.
    pub fn grid(&self, grid: usize) -> Vec<MapParams> {
        let (lr0, lr1) = (self.r_inner.ln(), self.r_outer.ln());
        let mut out = Vec::with_capacity(grid * grid);
        for i in 0..grid {
            let fr = (i as f64 + 0.5) / grid as f64;
            let r = (lr0 + fr * (lr1 - lr0)).exp();
            for j in 0..grid {
                let fa = (j as f64 + 0.5) / grid as f64;
                let psi = self.arg_min + fa * (self.arg_max - self.arg_min);
                out.push(
                    MapParams::from_polar(self.n, self.d, r, psi)
                        .expect("interior of W is admissible"),
                );
            }
        }
        out
    }

    /// `count` points on the outer arc, argument from `arg_min` to
    /// `arg_max` inclusive.
    pub fn outer_arc(&self, count: usize) -> Vec<MapParams> {
        self.arc(self.r_outer, count)
    }

    pub fn inner_arc(&self, count: usize) -> Vec<MapParams> {
        self.arc(self.r_inner, count)
    }

    fn arc(&self, r: f64, count: usize) -> Vec<MapParams> {
        (0..count)
            .map(|k| {
                let s = k as f64 / (count.max(2) - 1) as f64;
                let psi = self.arg_min + s * (self.arg_max - self.arg_min);
                MapParams::from_polar(self.n, self.d, r, psi).expect("admissible")
            })
            .collect()
    }

    /// One counter-clockwise traversal of `dW` in `steps` points: outer arc,
    /// upper radial segment inwards, inner arc, lower radial segment
    /// outwards. Radial segments take a quarter of the steps each and are
    /// spaced logarithmically; the arcs share the rest by length, each
    /// getting at least `steps/16`.
    pub fn boundary(&self, steps: usize) -> Result<Vec<BoundaryPoint>> {
        if steps < 16 {
            return Err(Error::InvalidArgument(format!(
                "boundary needs at least 16 steps, got {steps}"
            )));
        }
        let radial = steps / 4;
        let rest = steps - 2 * radial;
        let floor = steps / 16;
        let span = self.arg_max - self.arg_min;
        let (len_out, len_in) = (self.r_outer * span, self.r_inner * span);
        let mut n_out = ((rest as f64 * len_out / (len_out + len_in)).round() as usize).max(floor);
        let mut n_in = rest - n_out.min(rest);
        if n_in < floor {
            n_in = floor;
            n_out = rest - floor;
        }
        let (lr0, lr1) = (self.r_inner.ln(), self.r_outer.ln());
        let mk = |r: f64, psi: f64, segment| BoundaryPoint {
            params: MapParams::from_polar(self.n, self.d, r, psi).expect("admissible"),
            segment,
        };
        let mut out = Vec::with_capacity(steps);
        for k in 0..n_out {
            let s = k as f64 / n_out as f64;
            out.push(mk(self.r_outer, self.arg_min + s * span, BoundarySegment::OuterArc));
        }
        for k in 0..radial {
            let s = k as f64 / radial as f64;
            out.push(mk((lr1 + s * (lr0 - lr1)).exp(), self.arg_max, BoundarySegment::UpperRay));
        }
        for k in 0..n_in {
            let s = k as f64 / n_in as f64;
            out.push(mk(self.r_inner, self.arg_max - s * span, BoundarySegment::InnerArc));
        }
        for k in 0..radial {
            let s = k as f64 / radial as f64;
            out.push(mk((lr0 + s * (lr1 - lr0)).exp(), self.arg_min, BoundarySegment::LowerRay));
        }
        Ok(out)
    }
}

/// `{z : |z| < radius, theta2 < Arg z < theta1}` with the argument taken on
/// the branch centred at `(theta1 + theta2)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PacManRegion {
    pub radius: f64,
    pub theta1: f64,
    pub theta2: f64,
}

impl PacManRegion {
    pub fn new(radius: f64, theta1: f64, theta2: f64) -> Result<Self> {
        if !(radius > 0.0) || !(theta2 < theta1) || theta1 - theta2 >= 2.0 * PI {
            return Err(Error::InvalidArgument(format!(
                "Pac-Man needs radius > 0 and 0 < theta1 - theta2 < 2 pi \
                 (radius {radius}, theta1 {theta1}, theta2 {theta2})"
            )));
        }
        Ok(Self {
            radius,
            theta1,
            theta2,
        })
    }

    fn mid(&self) -> f64 {
        0.5 * (self.theta1 + self.theta2)
    }

    /// Argument of `z` on the branch `[mid - pi, mid + pi)`.
    pub fn branch_arg(&self, z: Complex64) -> f64 {
        self.mid() + wrap_angle(z.arg() - self.mid())
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let a = self.branch_arg(z);
        z.norm() < self.radius && self.theta2 < a && a < self.theta1
    }

    pub fn radial_margin(&self, z: Complex64) -> f64 {
        self.radius - z.norm()
    }

    pub fn angular_margin(&self, z: Complex64) -> f64 {
        let a = self.branch_arg(z);
        (a - self.theta2).min(self.theta1 - a)
    }

    /// Euclidean distance from `z` to the boundary (arc plus two segments
    /// from the origin).
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        let zero = Complex64::new(0.0, 0.0);
        let e1 = Complex64::from_polar(self.radius, self.theta1);
        let e2 = Complex64::from_polar(self.radius, self.theta2);
        let segs = crate::numerics::curve::point_segment_distance(z, zero, e1)
            .min(crate::numerics::curve::point_segment_distance(z, zero, e2));
        let a = self.branch_arg(z);
        let arc = if a > self.theta2 && a < self.theta1 {
            (z.norm() - self.radius).abs()
        } else {
            (z - e1).norm().min((z - e2).norm())
        };
        segs.min(arc)
    }

    /// Closed boundary polyline: origin, out along `theta2`, arc, back along
    /// `theta1`.
    pub fn boundary_curve(&self, samples: usize, label: &str) -> Curve {
        let seg = (samples / 4).max(2);
        let arc = samples.saturating_sub(2 * seg).max(8);
        let mut pts = Vec::with_capacity(2 * seg + arc);
        for k in 0..seg {
            pts.push(Complex64::from_polar(self.radius * k as f64 / seg as f64, self.theta2));
        }
        for k in 0..arc {
            let t = self.theta2 + (self.theta1 - self.theta2) * k as f64 / arc as f64;
            pts.push(Complex64::from_polar(self.radius, t));
        }
        for k in 0..seg {
            let r = self.radius * (seg - k) as f64 / seg as f64;
            pts.push(Complex64::from_polar(r, self.theta1));
        }
        Curve::new(pts, true, label)
    }
}

/// `theta1 = min{(n psi + d pi)/m, (n psi - d pi)/m + pi}` and
/// `theta2 = max{(n psi - d pi)/m, (n psi + d pi)/m - pi}`.
pub fn theta_bounds(p: &MapParams) -> (f64, f64) {
    let (n, d, m) = (p.n() as f64, p.d() as f64, p.m() as f64);
    let psi = p.psi();
    let plus = (n * psi + d * PI) / m;
    let minus = (n * psi - d * PI) / m;
    (plus.min(minus + PI), minus.max(plus - PI))
}

/// The corrected Pac-Man of radius `2 + epsilon`.
pub fn corrected_pacman(p: &MapParams, epsilon: f64) -> Result<PacManRegion> {
    let (t1, t2) = theta_bounds(p);
    PacManRegion::new(2.0 + epsilon, t1, t2)
}

/// The older Pac-Man `U`: radius 2, bounded by the two image lines on the
/// far side, so its opening is `2 max(n, d) pi / m`.
pub fn legacy_pacman(p: &MapParams) -> Result<PacManRegion> {
    let (n, d, m) = (p.n() as f64, p.d() as f64, p.m() as f64);
    let psi = p.psi();
    let plus = (n * psi + d * PI) / m;
    let minus = (n * psi - d * PI) / m;
    PacManRegion::new(2.0, plus.max(minus + PI), minus.min(plus - PI))
}

/// Rays `Arg z = (psi -+ pi)/m` bounding `V'` and `U'`.
pub fn sector_rays(p: &MapParams) -> (f64, f64) {
    let m = p.m() as f64;
    ((p.psi() - PI) / m, (p.psi() + PI) / m)
}

/// Signed angular distance of `z` inside the open sector
/// `((psi - pi)/m, (psi + pi)/m)`; positive inside.
pub fn sector_margin(p: &MapParams, z: Complex64) -> f64 {
    let m = p.m() as f64;
    PI / m - wrap_angle(z.arg() - p.psi() / m).abs()
}

pub fn in_sector(p: &MapParams, z: Complex64) -> bool {
    sector_margin(p, z) > 0.0
}

/// Radius on the ray `Arg z = theta` where `|F|` is smallest. Along each ray
/// `|F|` decreases strictly up to this radius and increases after it.
pub fn ray_min_radius(p: &MapParams, theta: f64) -> f64 {
    let (n, d) = (p.n() as f64, p.d() as f64);
    let l = p.lambda().norm();
    let cos_phi = (p.m() as f64 * theta - p.psi()).cos();
    let b = (n - d) * l * cos_phi;
    // positive root of n u^2 + b u - d l^2, in the cancellation-free form
    let disc = (b * b + 4.0 * n * d * l * l).sqrt();
    let u = if b <= 0.0 {
        (disc - b) / (2.0 * n)
    } else {
        2.0 * d * l * l / (disc + b)
    };
    u.powf(1.0 / p.m() as f64)
}

/// The two radii on the ray `Arg z = theta` where `|F| = level`, inner
/// first. When the minimum of `|F|` on the ray equals `level` to within
/// `1e-9` relative, both radii are the minimiser.
pub fn ray_level_radii(p: &MapParams, theta: f64, level: f64) -> Result<(f64, f64)> {
    let dir = Complex64::from_polar(1.0, theta);
    let f = |r: f64| p.eval_unchecked(dir * r).norm();
    let r_min = ray_min_radius(p, theta);
    let f_min = f(r_min);
    if f_min >= level {
        if f_min <= level * (1.0 + 1e-9) {
            return Ok((r_min, r_min));
        }
        return Err(Error::Construction(format!(
            "|F| >= {f_min} on the ray at argument {theta}, never reaches {level}"
        )));
    }
    let mut lo = r_min;
    while f(lo) < level {
        lo *= 0.5;
    }
    let mut hi = r_min;
    while f(hi) < level {
        hi *= 2.0;
    }
    let inner = bisect_log(|r| f(r) < level, lo, r_min);
    let outer = bisect_log(|r| f(r) < level, hi, r_min);
    Ok((inner, outer))
}

// Bisection in log r between `outside` (pred false) and `inside` (pred true).
fn bisect_log(pred: impl Fn(f64) -> bool, outside: f64, inside: f64) -> f64 {
    let (mut a, mut b) = (outside.ln(), inside.ln());
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        if pred(mid.exp()) {
            b = mid;
        } else {
            a = mid;
        }
    }
    (0.5 * (a + b)).exp()
}

/// The two components of `|F| = R`: the inner one of degree `d` around the
/// trap door and the outer one of degree `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreimagePair {
    pub inner: Curve,
    pub outer: Curve,
    /// Sorted monodromy cycle lengths; empty when the radial construction
    /// was used.
    pub cycle_type: Vec<usize>,
}

/// Follows the `m` preimages of `R e^{2 pi i t}` once around the circle and
/// splits them by monodromy cycle. Both curves come back counter-clockwise
/// and star-shaped about 0.
pub fn trace_preimage_pair(p: &MapParams, radius: f64, opts: &ContinuationOptions) -> Result<PreimagePair> {
    if !(radius >= 2.0) {
        return Err(Error::InvalidArgument(format!("preimage radius {radius} below 2")));
    }
    let (m, d) = (p.m() as usize, p.d() as usize);
    let lambda = p.lambda();
    let tracks = continue_roots(
        |t| {
            let w = Complex64::from_polar(radius, std::f64::consts::TAU * t);
            Polynomial::preimage_trinomial(m, d, w, lambda)
        },
        opts,
    )?;
    let cycles = tracks.cycles().expect("the path is a loop");
    let cycle_type = tracks.cycle_type().expect("the path is a loop");
    let mut want = vec![p.n() as usize, d];
    want.sort_unstable();
    if cycle_type != want {
        return Err(Error::Construction(format!(
            "monodromy at |w| = {radius} has cycles {cycle_type:?}, expected {want:?}"
        )));
    }
    let rc = p.critical_radius();
    let mut inner = None;
    let mut outer = None;
    for cycle in &cycles {
        let is_inner = cycle.len() == d;
        let label = if is_inner { "inner" } else { "outer" };
        let mut curve = tracks.cycle_curve(cycle, label);
        let separated = if is_inner {
            curve.max_modulus() < rc
        } else {
            curve.min_modulus() > rc
        };
        if !separated {
            return Err(Error::Construction(format!(
                "{label} preimage of |w| = {radius} crosses the critical circle |z| = {rc}"
            )));
        }
        match winding_number(&curve, Complex64::new(0.0, 0.0))? {
            1 => {}
            -1 => curve = curve.reversed(),
            w => {
                return Err(Error::Construction(format!(
                    "{label} preimage winds {w} times around 0"
                )))
            }
        }
        curve.check_star_shaped(Complex64::new(0.0, 0.0))?;
        if is_inner {
            inner = Some(curve);
        } else {
            outer = Some(curve);
        }
    }
    Ok(PreimagePair {
        inner: inner.expect("one cycle of length d"),
        outer: outer.expect("one cycle of length n"),
        cycle_type,
    })
}

/// Same curves built ray by ray with `ray_level_radii` at `samples`
/// equally spaced arguments. Used when `R` equals a critical value modulus
/// and continuation cannot pass.
pub fn radial_preimage_pair(p: &MapParams, radius: f64, samples: usize) -> Result<PreimagePair> {
    let mut inner = Vec::with_capacity(samples);
    let mut outer = Vec::with_capacity(samples);
    for k in 0..samples {
        let theta = -PI + std::f64::consts::TAU * k as f64 / samples as f64;
        let (ri, ro) = ray_level_radii(p, theta, radius)?;
        inner.push(Complex64::from_polar(ri, theta));
        outer.push(Complex64::from_polar(ro, theta));
    }
    Ok(PreimagePair {
        inner: Curve::new(inner, true, "inner"),
        outer: Curve::new(outer, true, "outer"),
        cycle_type: Vec::new(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionOptions {
    /// Samples on the circles Gamma, mu, Gamma-hat and on radially built curves.
    pub curve_points: usize,
    pub continuation_steps: usize,
    pub tol: f64,
}

impl Default for RegionOptions {
    fn default() -> Self {
        Self {
            curve_points: 1024,
            continuation_steps: crate::numerics::continuation::DEFAULT_STEPS,
            tol: DEFAULT_TOL,
        }
    }
}

impl RegionOptions {
    fn continuation(&self) -> ContinuationOptions {
        ContinuationOptions {
            steps: self.continuation_steps,
            hop_bound: None,
            tol: self.tol,
        }
    }
}

/// Traces `|F| = R`, falling back to the radial construction when the
/// circle passes through a critical value.
pub fn preimage_pair(p: &MapParams, radius: f64, opts: &RegionOptions) -> Result<PreimagePair> {
    match trace_preimage_pair(p, radius, &opts.continuation()) {
        Ok(pair) => Ok(pair),
        Err(Error::TrackCollision { .. }) | Err(Error::LoopMismatch(_)) => {
            radial_preimage_pair(p, radius, opts.curve_points)
        }
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonChoice {
    pub epsilon: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub gamma_n: Curve,
    pub gamma_d: Curve,
    pub gamma_hat_n: Curve,
    pub gamma_hat_d: Curve,
    pub halvings: u32,
}

/// `delta1 = d(Gamma, gamma_n)`, `delta2 = d(mu, gamma_d)`, then
/// `epsilon = min(delta1, delta2)/4` halved until both hatted curves are
/// within `min(delta1, delta2)/2` of their unhatted versions.
pub fn select_epsilon(p: &MapParams, opts: &RegionOptions) -> Result<EpsilonChoice> {
    let origin = Complex64::new(0.0, 0.0);
    let gamma = Curve::circle(origin, 2.0, opts.curve_points, "Gamma");
    let mu = Curve::circle(origin, p.mu_radius(), opts.curve_points, "mu");
    let pair = preimage_pair(p, 2.0, opts)?;
    let delta1 = curve_distance(&gamma, &pair.outer)?;
    let delta2 = curve_distance(&mu, &pair.inner)?;
    if delta1 <= 0.0 || delta2 <= 0.0 {
        return Err(Error::Sampling(format!(
            "delta1 = {delta1:.3e}, delta2 = {delta2:.3e} do not exceed the sampling slack; \
             raise curve points"
        )));
    }
    let half = 0.5 * delta1.min(delta2);
    let mut epsilon = 0.25 * delta1.min(delta2);
    for halvings in 0..=MAX_HALVINGS {
        let hat = trace_preimage_pair(p, 2.0 + epsilon, &opts.continuation())?;
        let dn = hausdorff_distance(&hat.outer, &pair.outer)?;
        let dd = hausdorff_distance(&hat.inner, &pair.inner)?;
        if dn < half && dd < half {
            return Ok(EpsilonChoice {
                epsilon,
                delta1,
                delta2,
                gamma_n: relabel(pair.outer, "gamma_n"),
                gamma_d: relabel(pair.inner, "gamma_d"),
                gamma_hat_n: relabel(hat.outer, "gamma_hat_n"),
                gamma_hat_d: relabel(hat.inner, "gamma_hat_d"),
                halvings,
            });
        }
        epsilon *= 0.5;
    }
    Err(Error::Construction(format!(
        "no epsilon found after {MAX_HALVINGS} halvings"
    )))
}

fn relabel(mut c: Curve, label: &str) -> Curve {
    c.label = label.into();
    c
}

/// Every region built for one parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionSystem {
    pub params: MapParams,
    pub w: ParamRectangle,
    pub gamma: Curve,
    pub mu: Curve,
    pub gamma_hat: Curve,
    pub gamma_n: Curve,
    pub gamma_d: Curve,
    pub gamma_hat_n: Curve,
    pub gamma_hat_d: Curve,
    pub epsilon: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub u_hat: PacManRegion,
    pub legacy_u: PacManRegion,
    pub legacy_u_prime_rays: (f64, f64),
}

impl RegionSystem {
    /// Requires `lambda` in the closure of `W`.
    pub fn build(p: &MapParams, opts: &RegionOptions) -> Result<Self> {
        let w = build_w(p.n(), p.d())?;
        if !w.contains_closure(p.lambda()) {
            return Err(Error::InvalidArgument(format!(
                "lambda = {} lies outside the closure of W",
                p.lambda()
            )));
        }
        Self::build_unchecked(p, opts)
    }

    /// Builds without checking `lambda in W`; for negative controls.
    pub fn build_unchecked(p: &MapParams, opts: &RegionOptions) -> Result<Self> {
        let w = build_w(p.n(), p.d())?;
        let eps = select_epsilon(p, opts)?;
        let origin = Complex64::new(0.0, 0.0);
        Ok(Self {
            params: *p,
            w,
            gamma: Curve::circle(origin, 2.0, opts.curve_points, "Gamma"),
            mu: Curve::circle(origin, p.mu_radius(), opts.curve_points, "mu"),
            gamma_hat: Curve::circle(origin, 2.0 + eps.epsilon, opts.curve_points, "Gamma_hat"),
            gamma_n: eps.gamma_n,
            gamma_d: eps.gamma_d,
            gamma_hat_n: eps.gamma_hat_n,
            gamma_hat_d: eps.gamma_hat_d,
            epsilon: eps.epsilon,
            delta1: eps.delta1,
            delta2: eps.delta2,
            u_hat: corrected_pacman(p, eps.epsilon)?,
            legacy_u: legacy_pacman(p)?,
            legacy_u_prime_rays: sector_rays(p),
        })
    }

    /// `2 + epsilon`.
    pub fn level(&self) -> f64 {
        2.0 + self.epsilon
    }

    /// In the sector and strictly between `gamma_hat_d` and `gamma_hat_n`
    /// along the ray through `z`. Since `|F|` is unimodal on rays this is
    /// `|F(z)| < 2 + epsilon`.
    pub fn in_v_prime(&self, z: Complex64) -> bool {
        z.norm() > 0.0 && in_sector(&self.params, z) && self.params.eval_unchecked(z).norm() < self.level()
    }

    pub fn in_u_hat(&self, w: Complex64) -> bool {
        self.u_hat.contains(w)
    }

    pub fn in_u_hat_prime(&self, z: Complex64) -> bool {
        self.in_v_prime(z) && self.u_hat.contains(self.params.eval_unchecked(z))
    }

    pub fn in_legacy_u_prime(&self, z: Complex64) -> bool {
        z.norm() > 0.0 && in_sector(&self.params, z) && self.params.eval_unchecked(z).norm() < 2.0
    }

    pub fn in_legacy_u(&self, w: Complex64) -> bool {
        self.legacy_u.contains(w)
    }

    /// Closed boundary of `V'`: the two sector rays and the arcs of the
    /// hatted curves between them, each point placed exactly on
    /// `|F| = 2 + epsilon` or on a ray. `per_side` samples per piece.
    pub fn v_prime_boundary(&self, per_side: usize) -> Result<Curve> {
        let (lo, hi) = sector_rays(&self.params);
        let level = self.level();
        let (ri_lo, ro_lo) = ray_level_radii(&self.params, lo, level)?;
        let (ri_hi, ro_hi) = ray_level_radii(&self.params, hi, level)?;
        let mut pts = Vec::with_capacity(4 * per_side);
        // outward along the lower ray
        for k in 0..per_side {
            let s = k as f64 / per_side as f64;
            pts.push(Complex64::from_polar((ri_lo.ln() + s * (ro_lo / ri_lo).ln()).exp(), lo));
        }
        // gamma_hat_n arc, counter-clockwise
        for k in 0..per_side {
            let t = lo + (hi - lo) * k as f64 / per_side as f64;
            let (_, ro) = ray_level_radii(&self.params, t, level)?;
            pts.push(Complex64::from_polar(ro, t));
        }
        // inward along the upper ray
        for k in 0..per_side {
            let s = k as f64 / per_side as f64;
            pts.push(Complex64::from_polar((ro_hi.ln() + s * (ri_hi / ro_hi).ln()).exp(), hi));
        }
        // gamma_hat_d arc, clockwise
        for k in 0..per_side {
            let t = hi - (hi - lo) * k as f64 / per_side as f64;
            let (ri, _) = ray_level_radii(&self.params, t, level)?;
            pts.push(Complex64::from_polar(ri, t));
        }
        Ok(Curve::new(pts, true, "V_prime_boundary"))
    }

    /// Boundary of `U-hat'` traced in the chart `(log |z|, Arg z - psi/m)`
    /// over the sector, mapped back to the plane.
    pub fn u_hat_prime_contour(&self, resolution: usize) -> Result<LogPolarContour> {
        let p = self.params;
        let m = p.m() as f64;
        let rot = p.psi() / m;
        let pad = 1.05;
        let x0 = (self.gamma_hat_d.min_modulus() / 1.5).ln();
        let x1 = (self.gamma_hat_n.max_modulus() * 1.5).ln();
        let rect = Rect::new(
            Complex64::new(x0, -pad * PI / m),
            Complex64::new(x1, pad * PI / m),
        );
        let to_plane = |q: Complex64| Complex64::from_polar(q.re.exp(), q.im + rot);
        let curves = extract_contour_with(
            |q| q.im.abs() < PI / m && self.in_u_hat_prime(to_plane(q)),
            rect,
            ContourOptions {
                resolution,
                refine_steps: 48,
            },
        )?;
        let cell_log_r = rect.width() / resolution as f64;
        let cell_theta = rect.height() / resolution as f64;
        Ok(LogPolarContour {
            curves: curves
                .into_iter()
                .map(|c| {
                    Curve::new(
                        c.samples.into_iter().map(to_plane).collect(),
                        true,
                        "U_hat_prime_boundary",
                    )
                })
                .collect(),
            cell_log_r,
            cell_theta,
        })
    }
}

#[derive(Clone, Debug)]
pub struct LogPolarContour {
    pub curves: Vec<Curve>,
    pub cell_log_r: f64,
    pub cell_theta: f64,
}

impl LogPolarContour {
    /// Plane size of one grid cell at `z`.
    pub fn cell_size_at(&self, z: Complex64) -> f64 {
        z.norm() * self.cell_log_r.max(self.cell_theta)
    }

    pub fn distance_to_point(&self, z: Complex64) -> f64 {
        self.curves
            .iter()
            .map(|c| c.distance_to_point(z))
            .fold(f64::INFINITY, f64::min)
    }
}
