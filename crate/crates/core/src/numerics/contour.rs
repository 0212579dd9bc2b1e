//! Boundary extraction for regions given only by a membership predicate
//! (marching squares on the indicator grid).

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::curve::Curve;
use crate::error::{Error, Result};

pub const MIN_RESOLUTION: usize = 64;

/// Axis-aligned rectangle in the complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub min: Complex64,
    pub max: Complex64,
}

impl Rect {
    pub fn new(min: Complex64, max: Complex64) -> Self {
        Self { min, max }
    }

    pub fn centered(center: Complex64, half_width: f64, half_height: f64) -> Self {
        Self {
            min: center - Complex64::new(half_width, half_height),
            max: center + Complex64::new(half_width, half_height),
        }
    }

    pub fn width(&self) -> f64 {
        self.max.re - self.min.re
    }

    pub fn height(&self) -> f64 {
        self.max.im - self.min.im
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourOptions {
    /// Grid nodes per axis minus one.
    pub resolution: usize,
    /// Bisection steps used to place each crossing on its grid edge; zero
    /// keeps the edge midpoint.
    pub refine_steps: u32,
}

impl Default for ContourOptions {
    fn default() -> Self {
        Self {
            resolution: 256,
            refine_steps: 0,
        }
    }
}

/// Closed polylines separating cells where `membership` is true from cells
/// where it is false, with crossings at edge midpoints. Each curve keeps the
/// region on its left. An empty region yields no curves.
pub fn extract_contour<P>(membership: P, rect: Rect, resolution: usize) -> Result<Vec<Curve>>
where
    P: Fn(Complex64) -> bool + Sync,
{
    extract_contour_with(
        membership,
        rect,
        ContourOptions {
            resolution,
            refine_steps: 0,
        },
    )
}

pub fn extract_contour_with<P>(membership: P, rect: Rect, opts: ContourOptions) -> Result<Vec<Curve>>
where
    P: Fn(Complex64) -> bool + Sync,
{
    let res = opts.resolution;
    if res < MIN_RESOLUTION {
        return Err(Error::InvalidArgument(format!(
            "contour resolution {res} below {MIN_RESOLUTION}"
        )));
    }
    if !(rect.width() > 0.0 && rect.height() > 0.0) {
        return Err(Error::InvalidArgument("degenerate contour rectangle".into()));
    }
    let grid = Grid::sample(&membership, rect, res);

    // Edge keys: (is_vertical, i, j). Horizontal edge (i,j)-(i+1,j); vertical
    // edge (i,j)-(i,j+1). Node indices run over -1..=res+1 with a false frame
    // so every curve closes.
    type Key = (bool, i64, i64);
    let mut next: HashMap<Key, Key> = HashMap::new();
    for j in -1..=res as i64 {
        for i in -1..=res as i64 {
            let corners = [
                grid.at(i, j),
                grid.at(i + 1, j),
                grid.at(i + 1, j + 1),
                grid.at(i, j + 1),
            ];
            let case = corners
                .iter()
                .enumerate()
                .fold(0u8, |acc, (k, &inside)| acc | ((inside as u8) << k));
            if case == 0 || case == 15 {
                continue;
            }
            let edges: [Key; 4] = [
                (false, i, j),
                (true, i + 1, j),
                (false, i, j + 1),
                (true, i, j),
            ];
            let center_inside = || membership(grid.node(i as f64 + 0.5, j as f64 + 0.5));
            for (a, b) in cell_segments(case, center_inside) {
                next.insert(edges[a], edges[b]);
            }
        }
    }

    let mut curves = Vec::new();
    let mut keys: Vec<Key> = next.keys().copied().collect();
    keys.sort_unstable();
    let mut visited: HashMap<Key, bool> = HashMap::with_capacity(keys.len());
    for &start in &keys {
        if visited.contains_key(&start) {
            continue;
        }
        let mut loop_keys = Vec::new();
        let mut k = start;
        loop {
            visited.insert(k, true);
            loop_keys.push(k);
            k = match next.get(&k) {
                Some(&n) => n,
                None => {
                    return Err(Error::Construction(
                        "marching squares produced an open chain".into(),
                    ))
                }
            };
            if k == start {
                break;
            }
        }
        let samples = loop_keys
            .iter()
            .map(|&(vertical, i, j)| {
                let (a, b) = if vertical {
                    ((i, j), (i, j + 1))
                } else {
                    ((i, j), (i + 1, j))
                };
                grid.crossing(&membership, a, b, opts.refine_steps)
            })
            .collect();
        curves.push(Curve::new(samples, true, "contour"));
    }
    Ok(curves)
}

/// Oriented segments (from edge, to edge) for one cell. Corners are numbered
/// counter-clockwise from the bottom-left; edge k joins corner k to k+1.
fn cell_segments(case: u8, center_inside: impl Fn() -> bool) -> Vec<(usize, usize)> {
    match case {
        1 => vec![(0, 3)],
        2 => vec![(1, 0)],
        4 => vec![(2, 1)],
        8 => vec![(3, 2)],
        3 => vec![(1, 3)],
        6 => vec![(2, 0)],
        12 => vec![(3, 1)],
        9 => vec![(0, 2)],
        14 => vec![(3, 0)],
        13 => vec![(0, 1)],
        11 => vec![(1, 2)],
        7 => vec![(2, 3)],
        5 => {
            if center_inside() {
                vec![(0, 1), (2, 3)]
            } else {
                vec![(0, 3), (2, 1)]
            }
        }
        10 => {
            if center_inside() {
                vec![(3, 0), (1, 2)]
            } else {
                vec![(1, 0), (3, 2)]
            }
        }
        _ => Vec::new(),
    }
}

struct Grid {
    rect: Rect,
    res: usize,
    inside: Vec<bool>,
}

impl Grid {
    fn sample<P: Fn(Complex64) -> bool + Sync>(membership: &P, rect: Rect, res: usize) -> Self {
        let n = res + 1;
        let mut grid = Self {
            rect,
            res,
            inside: Vec::new(),
        };
        grid.inside = (0..n * n)
            .into_par_iter()
            .map(|k| membership(grid.node((k % n) as f64, (k / n) as f64)))
            .collect();
        grid
    }

    fn node(&self, i: f64, j: f64) -> Complex64 {
        let r = self.res as f64;
        Complex64::new(
            self.rect.min.re + self.rect.width() * i / r,
            self.rect.min.im + self.rect.height() * j / r,
        )
    }

    fn at(&self, i: i64, j: i64) -> bool {
        let n = self.res as i64 + 1;
        if i < 0 || j < 0 || i >= n || j >= n {
            false
        } else {
            self.inside[(j * n + i) as usize]
        }
    }

    fn crossing<P: Fn(Complex64) -> bool>(
        &self,
        membership: &P,
        a: (i64, i64),
        b: (i64, i64),
        refine_steps: u32,
    ) -> Complex64 {
        let za = self.node(a.0 as f64, a.1 as f64);
        let zb = self.node(b.0 as f64, b.1 as f64);
        if refine_steps == 0 {
            return 0.5 * (za + zb);
        }
        let (mut zin, mut zout) = if self.at(a.0, a.1) { (za, zb) } else { (zb, za) };
        for _ in 0..refine_steps {
            let mid = 0.5 * (zin + zout);
            if membership(mid) {
                zin = mid;
            } else {
                zout = mid;
            }
        }
        0.5 * (zin + zout)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_contour() {
        let rect = Rect::centered(Complex64::new(0.0, 0.0), 2.0, 2.0);
        let curves = extract_contour(|z| z.norm() < 1.0, rect, 256).unwrap();
        assert_eq!(curves.len(), 1);
        let c = &curves[0];
        assert!(c.closed);
        for z in &c.samples {
            assert!((z.norm() - 1.0).abs() <= 2.0 * 4.0 / 256.0);
        }
        // region on the left: counter-clockwise about its interior
        let w = crate::numerics::winding_number(c, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(w, 1);
    }

    #[test]
    fn empty_region_gives_no_curves() {
        let rect = Rect::centered(Complex64::new(0.0, 0.0), 1.0, 1.0);
        assert!(extract_contour(|_| false, rect, 64).unwrap().is_empty());
    }

    #[test]
    fn region_touching_the_frame_still_closes() {
        let rect = Rect::centered(Complex64::new(0.0, 0.0), 1.0, 1.0);
        let curves = extract_contour(|z| z.re > 0.0, rect, 64).unwrap();
        assert_eq!(curves.len(), 1);
        assert!(curves[0].closed);
    }

    #[test]
    fn refinement_lands_on_boundary() {
        let rect = Rect::centered(Complex64::new(0.0, 0.0), 2.0, 2.0);
        let opts = ContourOptions {
            resolution: 64,
            refine_steps: 40,
        };
        let curves = extract_contour_with(|z| z.norm() < 1.0, rect, opts).unwrap();
        for z in &curves[0].samples {
            assert!((z.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn annulus_has_two_boundaries() {
        let rect = Rect::centered(Complex64::new(0.0, 0.0), 2.0, 2.0);
        let curves = extract_contour(|z| (0.5..1.5).contains(&z.norm()), rect, 128).unwrap();
        assert_eq!(curves.len(), 2);
    }

    #[test]
    fn low_resolution_rejected() {
        let rect = Rect::centered(Complex64::new(0.0, 0.0), 1.0, 1.0);
        assert!(extract_contour(|_| true, rect, 16).is_err());
    }
}
