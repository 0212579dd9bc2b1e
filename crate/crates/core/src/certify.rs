//! Numerical checks of the containment, degree-two and winding statements,
//! the reproductions of the older construction's failures, and the report
//! that collects them.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::family::MapParams;
use crate::numerics::{winding_number, wrap_angle, Curve};
use crate::regions::{
    build_w, ray_level_radii, sector_margin, sector_rays, theta_bounds, BoundarySegment,
    PacManRegion, RegionOptions, RegionSystem,
};

pub const DEFAULT_SEED: u64 = 0x5EED_2024;
pub const MIN_SAMPLES: usize = 100;
pub const MIN_BOUNDARY_STEPS: usize = 256;
/// Depth below which a point counts as lying on a region boundary.
pub const BOUNDARY_TOL: f64 = 1e-9;
/// Tolerance for `|v| = 2` and `|v| = radius of mu` on the arcs of `dW`.
pub const ARC_TOL: f64 = 1e-10;
/// Angular tolerance for the ray-image collinearity check.
pub const RAY_ANGLE_TOL: f64 = 1e-8;
/// Resolution of the log-polar grid used to trace the boundary of `U-hat'`.
pub const CONTOUR_RESOLUTION: usize = 256;

pub const EPSILON_POLICY: &str = "delta1 = d(Gamma, gamma_n), delta2 = d(mu, gamma_d); \
    epsilon starts at min(delta1, delta2)/4 and is halved (at most 40 times) until both \
    hatted curves are within min(delta1, delta2)/2 of the unhatted ones in Hausdorff distance";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub lambda: Complex64,
    pub passed: bool,
    /// Smallest slack observed; positive exactly when the check passed.
    pub margin: f64,
    pub details: String,
}

impl CheckResult {
    fn from_margin(name: &str, lambda: Complex64, margin: f64, details: String) -> Self {
        let margin = finite(margin);
        Self {
            name: name.into(),
            lambda,
            passed: margin > 0.0,
            margin,
            details,
        }
    }

    fn error(name: &str, lambda: Complex64, err: impl std::fmt::Display) -> Self {
        Self {
            name: name.into(),
            lambda,
            passed: false,
            margin: -1.0,
            details: err.to_string(),
        }
    }
}

// JSON has no infinities; clamp so reports always round-trip.
fn finite(x: f64) -> f64 {
    if x.is_nan() {
        -1.0
    } else {
        x.clamp(-f64::MAX, f64::MAX)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub n: u32,
    pub d: u32,
    pub grid: usize,
    pub boundary_steps: usize,
    pub epsilon_policy: String,
    pub lambda_samples: Vec<Complex64>,
    pub checks: Vec<CheckResult>,
    pub overall: bool,
    pub notes: Vec<String>,
}

impl CertificationReport {
    /// `(name, passed, total, min margin)` per check name, in first-seen order.
    pub fn summary(&self) -> Vec<(String, usize, usize, f64)> {
        let mut out: Vec<(String, usize, usize, f64)> = Vec::new();
        for c in &self.checks {
            let row = match out.iter_mut().find(|r| r.0 == c.name) {
                Some(r) => r,
                None => {
                    out.push((c.name.clone(), 0, 0, f64::INFINITY));
                    out.last_mut().expect("just pushed")
                }
            };
            row.1 += c.passed as usize;
            row.2 += 1;
            row.3 = row.3.min(c.margin);
        }
        out
    }
}

/// `min(theta1 - (psi + pi)/m, (psi - pi)/m - theta2)`.
pub fn theta_margin(p: &MapParams) -> f64 {
    let (t1, t2) = theta_bounds(p);
    let (lo, hi) = sector_rays(p);
    (t1 - hi).min(lo - t2)
}

/// Smallest `theta_margin` over `points` equally spaced `psi` in the closed
/// interval `[-pi/(n-1), pi/(n-1)]`, with the `psi` where it occurs.
pub fn theta_sweep(n: u32, d: u32, points: usize) -> Result<(f64, f64)> {
    let w = build_w(n, d)?;
    let mut worst = (f64::INFINITY, 0.0);
    for k in 0..points {
        let s = k as f64 / (points.max(2) - 1) as f64;
        let psi = w.arg_min + s * (w.arg_max - w.arg_min);
        let p = MapParams::from_polar(n, d, 1.0, psi)?;
        let margin = theta_margin(&p);
        if margin < worst.0 {
            worst = (margin, psi);
        }
    }
    Ok(worst)
}

/// `V'` lies in `U-hat`: the sector inequalities, and every boundary sample
/// of `V'` strictly inside the Pac-Man.
pub fn check_containment(rs: &RegionSystem, per_side: usize) -> CheckResult {
    let lambda = rs.params.lambda();
    let theta = theta_margin(&rs.params);
    let boundary = match rs.v_prime_boundary(per_side) {
        Ok(b) => b,
        Err(e) => return CheckResult::error("containment", lambda, e),
    };
    let radial = boundary
        .samples
        .iter()
        .map(|&z| rs.u_hat.radial_margin(z))
        .fold(f64::INFINITY, f64::min);
    let angular = boundary
        .samples
        .iter()
        .filter(|z| z.norm() > 0.0)
        .map(|&z| rs.u_hat.angular_margin(z))
        .fold(f64::INFINITY, f64::min);
    CheckResult::from_margin(
        "containment",
        lambda,
        theta.min(radial).min(angular),
        format!(
            "theta margin {theta:.3e}, radial margin {radial:.3e}, angular margin {angular:.3e} \
             over {} boundary samples",
            boundary.len()
        ),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionKind {
    /// Targets in `U-hat`, preimages counted in `U-hat'`.
    Corrected,
    /// Targets in the older `U`, preimages counted in `U'`.
    Legacy,
}

/// Area-uniform points of a Pac-Man from a seeded ChaCha8 stream.
pub fn sample_pacman(region: &PacManRegion, samples: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    while out.len() < samples {
        let r = region.radius * rng.random::<f64>().sqrt();
        let t = region.theta2 + (region.theta1 - region.theta2) * rng.random::<f64>();
        let w = Complex64::from_polar(r, t);
        if region.contains(w) {
            out.push(w);
        }
    }
    out
}

/// Preimage counts of sampled targets.
#[derive(Clone, Debug, PartialEq)]
pub struct CountSummary {
    pub targets: usize,
    /// `histogram[k]` targets with exactly `k` preimages in the region.
    pub histogram: Vec<usize>,
    /// Smallest distance of any preimage from the sector rays, in radians.
    pub min_ray_clearance: f64,
    pub first_bad: Option<(Complex64, usize)>,
}

/// Counts, for each target, the preimages (with multiplicity) in `U-hat'`
/// or `U'`. For a target in the Pac-Man, a preimage lies in the region
/// exactly when it lies in the sector, since `|F(z)| = |w|` is below the
/// level.
pub fn count_preimages(rs: &RegionSystem, targets: &[Complex64], kind: RegionKind) -> Result<CountSummary> {
    let p = &rs.params;
    let mut histogram = vec![0usize; p.m() as usize + 1];
    let mut clearance = f64::INFINITY;
    let mut first_bad = None;
    for &w in targets {
        let pre = p.preimages(w)?;
        let count = pre
            .iter()
            .filter(|&&z| match kind {
                RegionKind::Corrected => rs.in_u_hat_prime(z),
                RegionKind::Legacy => rs.in_legacy_u_prime(z),
            })
            .count();
        for &z in &pre {
            clearance = clearance.min(sector_margin(p, z).abs());
        }
        histogram[count] += 1;
        if count != 2 && first_bad.is_none() {
            first_bad = Some((w, count));
        }
    }
    Ok(CountSummary {
        targets: targets.len(),
        histogram,
        min_ray_clearance: clearance,
        first_bad,
    })
}

/// `U-hat' -> U-hat` (or `U' -> U`) is 2-to-1 on `samples` seeded targets;
/// for the corrected regions also checks that the traced boundary of
/// `U-hat'` maps onto the boundary of `U-hat` and lies inside `U-hat`.
pub fn check_degree_two(rs: &RegionSystem, samples: usize, seed: u64, kind: RegionKind) -> CheckResult {
    let lambda = rs.params.lambda();
    let name = match kind {
        RegionKind::Corrected => "degree_two",
        RegionKind::Legacy => "legacy_degree_two",
    };
    if samples < MIN_SAMPLES {
        return CheckResult::error(name, lambda, format!("{samples} samples, need at least {MIN_SAMPLES}"));
    }
    let region = match kind {
        RegionKind::Corrected => rs.u_hat,
        RegionKind::Legacy => rs.legacy_u,
    };
    let targets = sample_pacman(&region, samples, seed);
    let counts = match count_preimages(rs, &targets, kind) {
        Ok(c) => c,
        Err(e) => return CheckResult::error(name, lambda, e),
    };
    let bad = samples - counts.histogram[2];
    let mut details = format!(
        "{samples} targets, count histogram {:?}",
        counts
            .histogram
            .iter()
            .enumerate()
            .filter(|(_, &h)| h > 0)
            .collect::<Vec<_>>()
    );
    if let Some((w, k)) = counts.first_bad {
        details += &format!(", first target with {k} preimages: {w}");
    }
    let mut margin = if bad == 0 {
        counts.min_ray_clearance
    } else {
        -(bad as f64) / samples as f64
    };
    if kind == RegionKind::Corrected {
        match compactness_margin(rs) {
            Ok((m, info)) => {
                margin = margin.min(m);
                details += &format!(", {info}");
            }
            Err(e) => {
                margin = -1.0;
                details += &format!(", boundary trace failed: {e}");
            }
        }
    }
    CheckResult::from_margin(name, lambda, margin, details)
}

// Boundary of U-hat' maps into the boundary of U-hat and sits strictly
// inside U-hat.
fn compactness_margin(rs: &RegionSystem) -> Result<(f64, String)> {
    let contour = rs.u_hat_prime_contour(CONTOUR_RESOLUTION)?;
    if contour.curves.len() != 1 {
        return Ok((
            -1.0,
            format!("U-hat' boundary has {} components", contour.curves.len()),
        ));
    }
    let curve = &contour.curves[0];
    let tol = 1e-7 * rs.level();
    let mut on_boundary = f64::INFINITY;
    let mut inside = f64::INFINITY;
    for &z in &curve.samples {
        let fz = rs.params.eval_unchecked(z);
        on_boundary = on_boundary.min(tol - rs.u_hat.boundary_distance(fz));
        inside = inside
            .min(rs.u_hat.radial_margin(z))
            .min(rs.u_hat.angular_margin(z));
    }
    Ok((
        on_boundary.min(inside),
        format!(
            "{} boundary samples: image-on-boundary slack {on_boundary:.3e}, inside margin {inside:.3e}",
            curve.len()
        ),
    ))
}

/// Exactly one of the `m` critical points, namely `c_0`, lies in `U-hat'`.
pub fn check_unique_critical_point(rs: &RegionSystem) -> CheckResult {
    let p = &rs.params;
    let lambda = p.lambda();
    let data = p.critical_data();
    let inside: Vec<usize> = data
        .critical_points
        .iter()
        .enumerate()
        .filter(|(_, &c)| rs.in_u_hat_prime(c))
        .map(|(j, _)| j)
        .collect();
    let v = data.v_lambda;
    let c0_depth = sector_margin(p, data.c_lambda)
        .min(rs.level() - v.norm())
        .min(rs.u_hat.radial_margin(v))
        .min(rs.u_hat.angular_margin(v));
    let others = data.critical_points[1..]
        .iter()
        .map(|&c| -sector_margin(p, c))
        .fold(f64::INFINITY, f64::min);
    let margin = if inside == [0] { c0_depth.min(others) } else { -1.0 };
    CheckResult::from_margin(
        "unique_critical_point",
        lambda,
        margin,
        format!("critical points in U-hat': {inside:?}; c_0 depth {c0_depth:.3e}"),
    )
}

/// Each boundary ray of the older `U'` maps one-to-one onto a line through
/// the origin, and the two lines cross at `2 d pi / m mod pi`.
pub fn check_original_ray_error(p: &MapParams, samples: usize) -> CheckResult {
    let lambda = p.lambda();
    let (n, d, m) = (p.n() as f64, p.d() as f64, p.m() as f64);
    let psi = p.psi();
    let (ray_lo, ray_hi) = sector_rays(p);
    // ray (psi + pi)/m maps into the line at (n psi - d pi)/m, and vice versa
    let rays = [(ray_hi, (n * psi - d * PI) / m), (ray_lo, (n * psi + d * PI) / m)];
    let mut worst_angle = 0.0f64;
    let mut monotone = true;
    let mut fitted = [0.0f64; 2];
    for (k, &(theta, alpha)) in rays.iter().enumerate() {
        let (r0, r1) = match ray_level_radii(p, theta, 2.0) {
            Ok(r) => r,
            Err(e) => return CheckResult::error("original_ray_error", lambda, e),
        };
        let dir = Complex64::from_polar(1.0, theta);
        let rot = Complex64::from_polar(1.0, -alpha);
        let mut prev = f64::INFINITY;
        let mut sum = 0.0;
        let mut count = 0usize;
        for j in 0..samples {
            let s = (j as f64 + 0.5) / samples as f64;
            let r = (r0.ln() + s * (r1 / r0).ln()).exp();
            let f = p.eval_unchecked(dir * r) * rot;
            // signed coordinate along the line
            if f.re >= prev {
                monotone = false;
            }
            prev = f.re;
            if f.norm() > 1e-12 {
                let dev = (f.im / f.norm()).asin();
                worst_angle = worst_angle.max(dev.abs());
                sum += dev;
                count += 1;
            }
        }
        fitted[k] = alpha + sum / count.max(1) as f64;
    }
    let expected = (2.0 * d * PI / m).rem_euclid(PI);
    let measured = (fitted[1] - fitted[0]).rem_euclid(PI);
    let crossing_err = wrap_angle(2.0 * (measured - expected)).abs() / 2.0;
    let mut margin = (RAY_ANGLE_TOL - worst_angle).min(RAY_ANGLE_TOL - crossing_err);
    if !monotone || expected.abs() < 1e-12 {
        margin = margin.min(-1.0);
    }
    CheckResult::from_margin(
        "original_ray_error",
        lambda,
        margin,
        format!(
            "max angular deviation {worst_angle:.3e}, crossing angle {measured:.12} \
             (expected {expected:.12}), one-to-one: {monotone}"
        ),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExclusionMode {
    /// `v` outside the open set `U-hat'` (up to `BOUNDARY_TOL`).
    Open,
    /// `v` outside the closure of `U-hat'` by more than a grid cell.
    Closure,
}

/// One step of the walk around `dW`.
#[derive(Clone, Debug)]
pub struct WindingStep {
    pub lambda: Complex64,
    pub segment: BoundarySegment,
    pub v_in_u_hat: f64,
    pub exclusion: f64,
    pub modulus: f64,
}

#[derive(Clone, Debug)]
pub struct WindingOutcome {
    pub result: CheckResult,
    pub winding: Option<i64>,
    pub steps: Vec<WindingStep>,
}

/// Winding number of `v - c` around 0 as `lambda` runs once around `dW`.
pub fn critical_value_winding(n: u32, d: u32, boundary_steps: usize) -> Result<i64> {
    let w = build_w(n, d)?;
    let pts = w.boundary(boundary_steps)?;
    let loop_curve = Curve::new(
        pts.iter()
            .map(|b| b.params.critical_value() - b.params.critical_point())
            .collect(),
        true,
        "v - c",
    );
    winding_number(&loop_curve, Complex64::new(0.0, 0.0))
}

/// Walks `dW` in `boundary_steps` points. At each step: `v` in `U-hat`,
/// `v` excluded from `U-hat'` per `mode`, `|v| = 2` on the outer arc,
/// `|v| = radius of mu` on the inner arc, `v` on the sector ray on the
/// radial segments. Finally the winding number of `v - c` must be 1.
pub fn check_winding(
    n: u32,
    d: u32,
    boundary_steps: usize,
    mode: ExclusionMode,
    opts: &RegionOptions,
) -> WindingOutcome {
    let name = match mode {
        ExclusionMode::Open => "winding",
        ExclusionMode::Closure => "winding_closure",
    };
    let fail = |lambda, e: String| WindingOutcome {
        result: CheckResult::error(name, lambda, e),
        winding: None,
        steps: Vec::new(),
    };
    if boundary_steps < MIN_BOUNDARY_STEPS {
        return fail(
            Complex64::new(0.0, 0.0),
            format!("{boundary_steps} boundary steps, need at least {MIN_BOUNDARY_STEPS}"),
        );
    }
    let w = match build_w(n, d) {
        Ok(w) => w,
        Err(e) => return fail(Complex64::new(0.0, 0.0), e.to_string()),
    };
    let pts = match w.boundary(boundary_steps) {
        Ok(p) => p,
        Err(e) => return fail(Complex64::new(0.0, 0.0), e.to_string()),
    };
    let steps: Vec<std::result::Result<WindingStep, (Complex64, String)>> = pts
        .par_iter()
        .map(|b| winding_step(b.params, b.segment, mode, opts).map_err(|e| (b.params.lambda(), e.to_string())))
        .collect();
    let mut ok_steps = Vec::with_capacity(steps.len());
    for s in steps {
        match s {
            Ok(s) => ok_steps.push(s),
            Err((lambda, e)) => return fail(lambda, e),
        }
    }
    let winding = critical_value_winding(n, d, boundary_steps);
    let mut margin = f64::INFINITY;
    let mut worst = (0usize, w.center().lambda());
    let mut failed_steps = 0usize;
    for (k, s) in ok_steps.iter().enumerate() {
        let m = s.v_in_u_hat.min(s.exclusion).min(s.modulus);
        if m <= 0.0 {
            failed_steps += 1;
        }
        if m < margin {
            margin = m;
            worst = (k, s.lambda);
        }
    }
    let mut details = format!(
        "{boundary_steps} steps, {failed_steps} failing; worst step {} (t = {:.4}) on {:?}",
        worst.0,
        worst.0 as f64 / boundary_steps as f64,
        ok_steps[worst.0].segment
    );
    let winding = match winding {
        Ok(k) => {
            details += &format!(", winding number {k}");
            if k != 1 {
                margin = margin.min(-1.0);
            }
            Some(k)
        }
        Err(e) => {
            details += &format!(", winding number undefined: {e}");
            margin = margin.min(-1.0);
            None
        }
    };
    WindingOutcome {
        result: CheckResult::from_margin(name, worst.1, margin, details),
        winding,
        steps: ok_steps,
    }
}

fn winding_step(
    p: MapParams,
    segment: BoundarySegment,
    mode: ExclusionMode,
    opts: &RegionOptions,
) -> Result<WindingStep> {
    let rs = RegionSystem::build(&p, opts)?;
    let v = p.critical_value();
    let v_in_u_hat = rs.u_hat.radial_margin(v).min(rs.u_hat.angular_margin(v));
    // how far v sits outside U-hat' (negative inside)
    let outside_depth = (-sector_margin(&p, v))
        .max(p.eval_unchecked(v).norm() - rs.level())
        .max(-rs.u_hat.radial_margin(p.eval_unchecked(v)))
        .max(-rs.u_hat.angular_margin(p.eval_unchecked(v)));
    let exclusion = match mode {
        ExclusionMode::Open => BOUNDARY_TOL + outside_depth,
        ExclusionMode::Closure => {
            if rs.in_u_hat_prime(v) {
                -1.0
            } else {
                let contour = rs.u_hat_prime_contour(CONTOUR_RESOLUTION)?;
                contour.distance_to_point(v) - contour.cell_size_at(v)
            }
        }
    };
    let modulus = match segment {
        BoundarySegment::OuterArc => ARC_TOL - (v.norm() - 2.0).abs(),
        BoundarySegment::InnerArc => ARC_TOL - (v.norm() - p.mu_radius()).abs(),
        BoundarySegment::UpperRay | BoundarySegment::LowerRay => {
            let (lo, hi) = sector_rays(&p);
            let ray = if segment == BoundarySegment::UpperRay { hi } else { lo };
            ARC_TOL - wrap_angle(v.arg() - ray).abs()
        }
    };
    Ok(WindingStep {
        lambda: p.lambda(),
        segment,
        v_in_u_hat,
        exclusion,
        modulus,
    })
}

/// With `epsilon = 0` the critical value on the outer arc lies on the
/// boundary circle of the older `U`, so it is not in the open set.
pub fn check_legacy_boundary(n: u32, d: u32, samples: usize) -> CheckResult {
    let w = match build_w(n, d) {
        Ok(w) => w,
        Err(e) => return CheckResult::error("legacy_boundary", Complex64::new(0.0, 0.0), e),
    };
    let mut worst = 0.0f64;
    let mut contained = 0usize;
    for p in w.outer_arc(samples) {
        let u = match crate::regions::legacy_pacman(&p) {
            Ok(u) => u,
            Err(e) => return CheckResult::error("legacy_boundary", p.lambda(), e),
        };
        let v = p.critical_value();
        worst = worst.max(u.boundary_distance(v));
        if u.radial_margin(v) > ARC_TOL {
            contained += 1;
        }
    }
    CheckResult::from_margin(
        "legacy_boundary",
        w.center().lambda(),
        if contained > 0 { -1.0 } else { ARC_TOL - worst },
        format!(
            "{samples} outer-arc samples: largest distance from v to the boundary of U {worst:.3e}, \
             {contained} strictly inside"
        ),
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertifyOptions {
    pub grid: usize,
    pub boundary_steps: usize,
    pub samples: usize,
    pub seed: u64,
    pub region: RegionOptions,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            grid: 9,
            boundary_steps: MIN_BOUNDARY_STEPS,
            samples: 200,
            seed: DEFAULT_SEED,
            region: RegionOptions::default(),
        }
    }
}

/// All per-parameter checks at one `lambda`, in a fixed order.
pub fn certify_parameter(p: &MapParams, opts: &CertifyOptions) -> Vec<CheckResult> {
    let rs = match RegionSystem::build(p, &opts.region) {
        Ok(rs) => rs,
        Err(e) => return vec![CheckResult::error("region_construction", p.lambda(), e)],
    };
    vec![
        check_containment(&rs, opts.region.curve_points / 4),
        check_degree_two(&rs, opts.samples, opts.seed, RegionKind::Corrected),
        check_unique_critical_point(&rs),
    ]
}

/// The older construction fails to be 2-to-1: passes when some target has
/// a preimage count other than 2.
pub fn check_legacy_failure(rs: &RegionSystem, samples: usize, seed: u64) -> CheckResult {
    let r = check_degree_two(rs, samples, seed, RegionKind::Legacy);
    let margin = if r.passed { -1.0 } else { -r.margin };
    CheckResult {
        name: "legacy_not_two_to_one".into(),
        lambda: r.lambda,
        passed: margin > 0.0,
        margin: finite(margin),
        details: r.details,
    }
}

/// Runs every check over a `grid x grid` interior sample of `W`, around
/// `dW`, and the error reproductions at the centre of `W`.
pub fn run_full_certification(n: u32, d: u32, opts: &CertifyOptions) -> Result<CertificationReport> {
    if opts.grid < 5 {
        return Err(crate::Error::InvalidArgument(format!(
            "grid {} below 5",
            opts.grid
        )));
    }
    let w = build_w(n, d)?;
    let params = w.grid(opts.grid);
    let per_lambda: Vec<Vec<CheckResult>> = params.par_iter().map(|p| certify_parameter(p, opts)).collect();
    let mut checks: Vec<CheckResult> = per_lambda.into_iter().flatten().collect();

    checks.push(check_winding(n, d, opts.boundary_steps, ExclusionMode::Open, &opts.region).result);
    checks.push(check_legacy_boundary(n, d, opts.boundary_steps));
    let center = w.center();
    checks.push(check_original_ray_error(&center, 512));
    match RegionSystem::build(&center, &opts.region) {
        Ok(rs) => checks.push(check_legacy_failure(&rs, opts.samples, opts.seed)),
        Err(e) => checks.push(CheckResult::error("legacy_not_two_to_one", center.lambda(), e)),
    }

    let overall = checks.iter().all(|c| c.passed);
    Ok(CertificationReport {
        n,
        d,
        grid: opts.grid,
        boundary_steps: opts.boundary_steps,
        epsilon_policy: EPSILON_POLICY.into(),
        lambda_samples: params.iter().map(|p| p.lambda()).collect(),
        checks,
        overall,
        notes: vec![
            format!(
                "sector bound taken as (2j+1) pi/(n-1), matching W's arguments +-pi/{}",
                n - 1
            ),
            "winding: exclusion of v from U-hat' is checked for the open set; on the radial \
             segments of dW, v lies on the boundary ray of U-hat'"
                .into(),
            "legacy checks pass when they reproduce the older construction's failure".into(),
        ],
    })
}
