//! Sampled planar curves and distances between them.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest sample count accepted by certification checks.
pub const MIN_CERT_SAMPLES: usize = 16;

/// An ordered list of samples along a curve. For closed curves the last
/// sample connects back to the first; the first point is not repeated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub samples: Vec<Complex64>,
    pub closed: bool,
    pub label: String,
}

impl Curve {
    pub fn new(samples: Vec<Complex64>, closed: bool, label: impl Into<String>) -> Self {
        Self {
            samples,
            closed,
            label: label.into(),
        }
    }

    /// Counter-clockwise circle starting at angle 0.
    pub fn circle(center: Complex64, radius: f64, samples: usize, label: impl Into<String>) -> Self {
        let pts = (0..samples)
            .map(|k| center + Complex64::from_polar(radius, TAU * k as f64 / samples as f64))
            .collect();
        Self::new(pts, true, label)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn reversed(&self) -> Self {
        let mut samples = self.samples.clone();
        samples.reverse();
        Self::new(samples, self.closed, self.label.clone())
    }

    /// Consecutive sample pairs, including the closing edge of a closed curve.
    pub fn segments(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        let n = self.samples.len();
        let count = match (self.closed, n) {
            (_, 0) => 0,
            (true, 1) => 0,
            (true, _) => n,
            (false, _) => n - 1,
        };
        (0..count).map(move |i| (self.samples[i], self.samples[(i + 1) % n]))
    }

    pub fn max_gap(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).fold(0.0, f64::max)
    }

    pub fn max_modulus(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn min_modulus(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
    }

    /// Euclidean distance from `z` to the polyline through the samples.
    pub fn distance_to_point(&self, z: Complex64) -> f64 {
        if self.samples.len() == 1 {
            return (self.samples[0] - z).norm();
        }
        self.segments()
            .map(|(a, b)| point_segment_distance(z, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Checks the curve crosses every ray from `center` exactly once, i.e.
    /// the unwrapped argument is strictly monotone and sweeps one full turn.
    pub fn check_star_shaped(&self, center: Complex64) -> Result<()> {
        if !self.closed || self.samples.len() < 3 {
            return Err(Error::Construction(format!(
                "{}: star-shape test needs a closed curve",
                self.label
            )));
        }
        let mut total = 0.0;
        let mut sign = 0.0;
        for (a, b) in self.segments() {
            let step = ((b - center) / (a - center)).arg();
            if step == 0.0 || (sign != 0.0 && step.signum() != sign) {
                return Err(Error::Construction(format!(
                    "{} is not star-shaped about {center}",
                    self.label
                )));
            }
            sign = step.signum();
            total += step;
        }
        if ((total.abs() - TAU) / TAU).abs() > 1e-6 {
            return Err(Error::Construction(format!(
                "{} sweeps {total} rad about {center}, expected one turn",
                self.label
            )));
        }
        Ok(())
    }
}

pub(crate) fn point_segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = ((z - a) * ab.conj()).re / len2;
    (z - (a + ab * t.clamp(0.0, 1.0))).norm()
}

/// Samples grouped into chunks with bounding boxes, so nearest-sample queries
/// can skip whole chunks.
struct ChunkIndex<'a> {
    samples: &'a [Complex64],
    boxes: Vec<(usize, usize, Complex64, Complex64)>,
}

const CHUNK: usize = 32;

impl<'a> ChunkIndex<'a> {
    fn new(samples: &'a [Complex64]) -> Self {
        let boxes = samples
            .chunks(CHUNK)
            .enumerate()
            .map(|(k, chunk)| {
                let (lo, hi) = chunk.iter().fold(
                    (
                        Complex64::new(f64::INFINITY, f64::INFINITY),
                        Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
                    ),
                    |(lo, hi), z| {
                        (
                            Complex64::new(lo.re.min(z.re), lo.im.min(z.im)),
                            Complex64::new(hi.re.max(z.re), hi.im.max(z.im)),
                        )
                    },
                );
                (k * CHUNK, k * CHUNK + chunk.len(), lo, hi)
            })
            .collect();
        Self { samples, boxes }
    }

    fn nearest(&self, z: Complex64) -> f64 {
        let mut best = f64::INFINITY;
        for &(start, end, lo, hi) in &self.boxes {
            let dx = (lo.re - z.re).max(0.0).max(z.re - hi.re);
            let dy = (lo.im - z.im).max(0.0).max(z.im - hi.im);
            if dx * dx + dy * dy >= best * best {
                continue;
            }
            for s in &self.samples[start..end] {
                best = best.min((s - z).norm());
            }
        }
        best
    }
}

fn check_nonempty(a: &Curve, b: &Curve) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "curve distance needs samples ({}: {}, {}: {})",
            a.label,
            a.len(),
            b.label,
            b.len()
        )));
    }
    Ok(())
}

/// Certified lower bound on the distance between the underlying curves: the
/// minimum sample-to-sample distance minus half the largest sampling gap of
/// each curve. Clamped at zero.
pub fn curve_distance(a: &Curve, b: &Curve) -> Result<f64> {
    check_nonempty(a, b)?;
    let index = ChunkIndex::new(&b.samples);
    let raw = a
        .samples
        .iter()
        .map(|&z| index.nearest(z))
        .fold(f64::INFINITY, f64::min);
    Ok((raw - 0.5 * (a.max_gap() + b.max_gap())).max(0.0))
}

/// Upper bound on the Hausdorff distance between the underlying curves:
/// the symmetric sample Hausdorff distance plus half of each sampling gap.
pub fn hausdorff_distance(a: &Curve, b: &Curve) -> Result<f64> {
    check_nonempty(a, b)?;
    let one_sided = |x: &Curve, y: &Curve| {
        let index = ChunkIndex::new(&y.samples);
        x.samples.iter().map(|&z| index.nearest(z)).fold(0.0, f64::max)
    };
    let raw = one_sided(a, b).max(one_sided(b, a));
    Ok(raw + 0.5 * (a.max_gap() + b.max_gap()))
}

/// Radius of a star-shaped closed curve as a periodic, piecewise-linear
/// function of the argument.
#[derive(Clone, Debug)]
pub struct RadialProfile {
    // (argument in [-pi, pi), radius), sorted by argument
    nodes: Vec<(f64, f64)>,
}

impl RadialProfile {
    pub fn from_curve(c: &Curve) -> Result<Self> {
        c.check_star_shaped(Complex64::new(0.0, 0.0))?;
        let mut nodes: Vec<(f64, f64)> = c
            .samples
            .iter()
            .map(|z| (wrap_angle(z.arg()), z.norm()))
            .collect();
        nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self { nodes })
    }

    pub fn radius_at(&self, theta: f64) -> f64 {
        let t = wrap_angle(theta);
        let n = self.nodes.len();
        let idx = self.nodes.partition_point(|&(a, _)| a <= t);
        let (a0, r0, a1, r1) = if idx == 0 || idx == n {
            let (al, rl) = self.nodes[n - 1];
            let (af, rf) = self.nodes[0];
            // wrap-around interval between the last and first nodes
            let (al, af) = if idx == 0 { (al - TAU, af) } else { (al, af + TAU) };
            (al, rl, af, rf)
        } else {
            let (a0, r0) = self.nodes[idx - 1];
            let (a1, r1) = self.nodes[idx];
            (a0, r0, a1, r1)
        };
        if a1 == a0 {
            return r0;
        }
        let s = ((t - a0) / (a1 - a0)).clamp(0.0, 1.0);
        r0 + s * (r1 - r0)
    }
}

/// Maps an angle into `[-pi, pi)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let w = (theta + PI).rem_euclid(TAU) - PI;
    if w >= PI {
        w - TAU
    } else {
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ORIGIN: Complex64 = Complex64::new(0.0, 0.0);

    #[test]
    fn concentric_circles_are_two_apart() {
        let a = Curve::circle(ORIGIN, 1.0, 1024, "a");
        let b = Curve::circle(ORIGIN, 3.0, 1024, "b");
        let d = curve_distance(&a, &b).unwrap();
        let slack = 0.5 * (a.max_gap() + b.max_gap());
        assert!(d <= 2.0 && d >= 2.0 - slack - 1e-12, "{d}");
    }

    #[test]
    fn identical_curves_have_zero_distance() {
        let a = Curve::circle(ORIGIN, 1.0, 64, "a");
        assert_eq!(curve_distance(&a, &a.clone()).unwrap(), 0.0);
    }

    #[test]
    fn empty_curve_is_rejected() {
        let a = Curve::new(vec![], true, "empty");
        let b = Curve::circle(ORIGIN, 1.0, 64, "b");
        assert!(curve_distance(&a, &b).is_err());
        assert!(hausdorff_distance(&b, &a).is_err());
    }

    #[test]
    fn hausdorff_of_offset_circles_bounds_radius_gap() {
        let a = Curve::circle(ORIGIN, 1.0, 512, "a");
        let b = Curve::circle(ORIGIN, 1.1, 700, "b");
        let h = hausdorff_distance(&a, &b).unwrap();
        assert!(h >= 0.1 && h < 0.1 + a.max_gap() + b.max_gap());
    }

    #[test]
    fn polyline_distance() {
        let sq = Curve::new(
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 1.0),
                Complex64::new(0.0, 1.0),
            ],
            true,
            "square",
        );
        assert!((sq.distance_to_point(Complex64::new(0.5, 0.5)) - 0.5).abs() < 1e-15);
        assert!((sq.distance_to_point(Complex64::new(-1.0, 0.5)) - 1.0).abs() < 1e-15);
        assert_eq!(sq.segments().count(), 4);
    }

    #[test]
    fn star_shape_and_profile() {
        let ellipse = Curve::new(
            (0..400)
                .map(|k| {
                    let t = TAU * k as f64 / 400.0;
                    Complex64::new(2.0 * t.cos(), t.sin())
                })
                .collect(),
            true,
            "ellipse",
        );
        let prof = RadialProfile::from_curve(&ellipse).unwrap();
        assert!((prof.radius_at(0.0) - 2.0).abs() < 1e-3);
        assert!((prof.radius_at(PI / 2.0) - 1.0).abs() < 1e-3);
        assert!((prof.radius_at(PI) - 2.0).abs() < 1e-3);
        assert!((prof.radius_at(-PI + 1e-9) - 2.0).abs() < 1e-3);

        let off_center = Curve::circle(Complex64::new(3.0, 0.0), 1.0, 64, "off");
        assert!(off_center.check_star_shaped(ORIGIN).is_err());
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), -PI);
        assert!((wrap_angle(3.0 * PI + 0.5) - (-PI + 0.5)).abs() < 1e-12);
        assert!((wrap_angle(-0.25) + 0.25).abs() < 1e-15);
    }
}
