use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;

use super::curve::Curve;
use crate::error::{Error, Result};

/// Points closer than this to a sample are considered on the curve.
pub const ON_CURVE_TOL: f64 = 1e-12;

/// Winding number of a closed curve around `z0`, from the summed argument
/// increments of `sample - z0`.
///
/// Refuses when `z0` sits on the curve or when two consecutive samples
/// subtend `pi/2` or more as seen from `z0`; in that case the caller must
/// resample more densely.
pub fn winding_number(c: &Curve, z0: Complex64) -> Result<i64> {
    if !c.closed {
        return Err(Error::Winding(format!("{} is not closed", c.label)));
    }
    if c.samples.len() < 3 {
        return Err(Error::Winding(format!("{} has too few samples", c.label)));
    }
    if let Some(s) = c.samples.iter().find(|s| (*s - z0).norm() <= ON_CURVE_TOL) {
        return Err(Error::Winding(format!(
            "{z0} lies on {} (sample {s})",
            c.label
        )));
    }
    let mut total = 0.0;
    for (i, (a, b)) in c.segments().enumerate() {
        let step = ((b - z0) / (a - z0)).arg();
        if step.abs() >= FRAC_PI_2 {
            return Err(Error::Winding(format!(
                "{}: segment {i} subtends {step:.3} rad from {z0}; refine sampling",
                c.label
            )));
        }
        total += step;
    }
    Ok((total / TAU).round() as i64)
}
