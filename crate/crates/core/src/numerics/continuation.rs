//! Predictor–corrector continuation of polynomial roots along a coefficient
//! path, with monodromy read-off for closed loops.

use num_complex::Complex64;

use super::curve::Curve;
use super::polynomial::{solve_root_clusters, Polynomial, DEFAULT_TOL};
use crate::error::{Error, Result};

pub const DEFAULT_STEPS: usize = 512;
pub const MIN_STEPS: usize = 64;

// Halvings allowed below the base step before giving up.
const MAX_HALVINGS: u32 = 30;
const NEWTON_ITERS: usize = 12;

#[derive(Clone, Debug)]
pub struct ContinuationOptions {
    /// Base number of steps over `t in [0, 1]`; the step is refined
    /// adaptively but never coarsened beyond `1/steps`.
    pub steps: usize,
    /// Largest allowed move of a single root in one step. Defaults to a
    /// quarter of the smallest root separation at `t = 0`.
    pub hop_bound: Option<f64>,
    pub tol: f64,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            steps: DEFAULT_STEPS,
            hop_bound: None,
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RootTracks {
    /// One open curve per root, sampled at the accepted parameter values.
    pub tracks: Vec<Curve>,
    pub params: Vec<f64>,
    /// `permutation[i] = j` when track `i` ends where track `j` started.
    /// Only present when the path is a closed loop.
    pub permutation: Option<Vec<usize>>,
}

impl RootTracks {
    /// Cycles of the monodromy permutation, each listed in traversal order
    /// starting from its smallest index.
    pub fn cycles(&self) -> Option<Vec<Vec<usize>>> {
        let perm = self.permutation.as_ref()?;
        let mut seen = vec![false; perm.len()];
        let mut out = Vec::new();
        for start in 0..perm.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i);
                i = perm[i];
            }
            out.push(cycle);
        }
        Some(out)
    }

    /// Sorted cycle lengths.
    pub fn cycle_type(&self) -> Option<Vec<usize>> {
        let mut lens: Vec<usize> = self.cycles()?.iter().map(Vec::len).collect();
        lens.sort_unstable();
        Some(lens)
    }

    /// Joins the tracks of one cycle into a closed curve. Each track's last
    /// sample duplicates the next track's first and is dropped.
    pub fn cycle_curve(&self, cycle: &[usize], label: &str) -> Curve {
        let samples = cycle
            .iter()
            .flat_map(|&i| {
                let s = &self.tracks[i].samples;
                s[..s.len() - 1].iter().copied()
            })
            .collect();
        Curve::new(samples, true, label)
    }
}

fn min_separation(pts: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.min((pts[i] - pts[j]).norm());
        }
    }
    best
}

/// Continues all roots of `path(t)` from `t = 0` to `t = 1`.
///
/// The degree must be constant along the path. If two tracks come closer
/// than `tol` (a critical value on the path), the call fails with
/// [`Error::TrackCollision`].
pub fn continue_roots<F>(path: F, opts: &ContinuationOptions) -> Result<RootTracks>
where
    F: Fn(f64) -> Polynomial,
{
    if opts.steps < MIN_STEPS {
        return Err(Error::InvalidArgument(format!(
            "continuation needs at least {MIN_STEPS} steps, got {}",
            opts.steps
        )));
    }
    let start = path(0.0);
    let deg = start.degree();
    let clusters = solve_root_clusters(&start, opts.tol)?;
    if clusters.len() != deg {
        return Err(Error::TrackCollision { step: 0, t: 0.0 });
    }
    let mut roots: Vec<Complex64> = clusters.iter().map(|c| c.center).collect();
    let hop = opts
        .hop_bound
        .unwrap_or_else(|| 0.25 * min_separation(&roots).min(1.0));

    let base = 1.0 / opts.steps as f64;
    let mut dt = base;
    let mut t = 0.0;
    let mut velocity = vec![Complex64::new(0.0, 0.0); deg];
    let mut samples: Vec<Vec<Complex64>> = roots.iter().map(|&r| vec![r]).collect();
    let mut params = vec![0.0];
    let mut step = 0usize;

    while t < 1.0 {
        let h = dt.min(1.0 - t);
        let t1 = if 1.0 - t <= dt { 1.0 } else { t + h };
        let poly = path(t1);
        if poly.degree() != deg {
            return Err(Error::InvalidArgument(format!(
                "degree changed from {deg} to {} at t = {t1}",
                poly.degree()
            )));
        }
        let predicted: Vec<Complex64> = roots
            .iter()
            .zip(&velocity)
            .map(|(&r, &v)| r + v * h)
            .collect();
        match correct(&poly, &predicted, &roots, hop, opts.tol) {
            Some(next) => {
                for i in 0..deg {
                    velocity[i] = (next[i] - roots[i]) / h;
                    samples[i].push(next[i]);
                }
                roots = next;
                t = t1;
                params.push(t);
                step += 1;
                dt = (dt * 2.0).min(base);
            }
            None => {
                dt *= 0.5;
                if dt < base * 0.5f64.powi(MAX_HALVINGS as i32) {
                    return Err(Error::TrackCollision { step, t });
                }
            }
        }
    }

    let end = path(1.0);
    let is_loop = start
        .coeffs()
        .iter()
        .zip(end.coeffs())
        .all(|(a, b)| (a - b).norm() <= 1e-12 * (1.0 + a.norm()));
    let permutation = if is_loop {
        Some(match_loop(&samples)?)
    } else {
        None
    };

    Ok(RootTracks {
        tracks: samples
            .into_iter()
            .enumerate()
            .map(|(i, s)| Curve::new(s, false, format!("track {i}")))
            .collect(),
        params,
        permutation,
    })
}

/// Newton-corrects every predicted root; `None` when the step must be
/// refined (non-convergence, a hop over the bound, or a root drifting
/// towards another track).
fn correct(
    poly: &Polynomial,
    predicted: &[Complex64],
    previous: &[Complex64],
    hop: f64,
    tol: f64,
) -> Option<Vec<Complex64>> {
    let residual_bound = tol * (1.0 + poly.max_coeff_norm());
    let mut out = Vec::with_capacity(predicted.len());
    for (i, &guess) in predicted.iter().enumerate() {
        let mut z = guess;
        let mut converged = false;
        for _ in 0..NEWTON_ITERS {
            let (v, dv) = poly.eval_with_derivative(z);
            if dv.norm() == 0.0 {
                break;
            }
            let delta = v / dv;
            z -= delta;
            if delta.norm() <= 1e-14 * (1.0 + z.norm()) {
                converged = true;
                break;
            }
        }
        if !converged && poly.eval(z).norm() > residual_bound {
            return None;
        }
        if (z - previous[i]).norm() > hop {
            return None;
        }
        let nearest_other = predicted
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &q)| (q - guess).norm())
            .fold(f64::INFINITY, f64::min);
        if (z - guess).norm() > 0.25 * nearest_other {
            return None;
        }
        out.push(z);
    }
    if min_separation(&out) <= tol {
        return None;
    }
    Some(out)
}

fn match_loop(samples: &[Vec<Complex64>]) -> Result<Vec<usize>> {
    let starts: Vec<Complex64> = samples.iter().map(|s| s[0]).collect();
    let mut perm = Vec::with_capacity(samples.len());
    let mut used = vec![false; samples.len()];
    for (i, s) in samples.iter().enumerate() {
        let end = *s.last().expect("tracks are nonempty");
        let (j, dist) = starts
            .iter()
            .enumerate()
            .map(|(j, &z)| (j, (z - end).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("at least one root");
        if dist > 1e-6 * (1.0 + end.norm()) || used[j] {
            return Err(Error::LoopMismatch(format!(
                "track {i} ends at {end}, {dist:.3e} from the nearest start"
            )));
        }
        used[j] = true;
        perm.push(j);
    }
    Ok(perm)
}
