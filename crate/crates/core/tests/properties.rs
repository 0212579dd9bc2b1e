use std::f64::consts::PI;

use halo_core::family::MapParams;
use halo_core::numerics::{
    continue_roots, extract_contour, solve_roots, winding_number, ContinuationOptions, Curve,
    Polynomial, Rect,
};
use halo_core::regions::{build_w, corrected_pacman, legacy_pacman, ray_min_radius};
use num_complex::Complex64;
use proptest::prelude::*;

const PAIRS: [(u32, u32); 4] = [(3, 4), (4, 3), (2, 5), (5, 2)];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A parameter in W from unit-square coordinates.
fn param_in_w(pair: usize, s: f64, t: f64) -> MapParams {
    let (n, d) = PAIRS[pair];
    let w = build_w(n, d).unwrap();
    let r = (w.r_inner.ln() + s * (w.r_outer / w.r_inner).ln()).exp();
    MapParams::from_polar(n, d, r, w.arg_min + t * (w.arg_max - w.arg_min)).unwrap()
}

fn unit() -> impl Strategy<Value = f64> {
    0.0..=1.0f64
}

fn separation(roots: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in roots.iter().enumerate() {
        for b in &roots[i + 1..] {
            best = best.min((a - b).norm());
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn synthetic_roots_are_recovered(
        raw in prop::collection::vec((0.05..1.0f64, -PI..PI), 1..=12)
    ) {
        let roots: Vec<Complex64> = raw.iter().map(|&(r, a)| Complex64::from_polar(r, a)).collect();
        prop_assume!(separation(&roots) > 0.25);
        let poly = Polynomial::from_roots(&roots);
        prop_assert!(poly.max_coeff_norm() <= 1e3);
        let found = solve_roots(&poly, 1e-12).unwrap();
        prop_assert_eq!(found.len(), roots.len());
        for r in &roots {
            let err = found.iter().map(|f| (f - r).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(err < 1e-9, "root {} recovered to {:e}", r, err);
        }
    }

    #[test]
    fn preimage_product_is_vieta(pair in 0..4usize, s in unit(), t in unit(), wr in -3.0..3.0f64, wi in -3.0..3.0f64) {
        let p = param_in_w(pair, s, t);
        let roots = p.preimages(c(wr, wi)).unwrap();
        prop_assert_eq!(roots.len(), p.m() as usize);
        let prod: Complex64 = roots.iter().product();
        let sign = if p.m().is_multiple_of(2) { 1.0 } else { -1.0 };
        prop_assert!((prod - sign * p.lambda()).norm() <= 1e-8 * p.lambda().norm());
    }

    #[test]
    fn preimages_of_image_contain_point(pair in 0..4usize, s in unit(), t in unit(), r in 0.05..3.0f64, a in -PI..PI) {
        let p = param_in_w(pair, s, t);
        let z = Complex64::from_polar(r, a);
        // stay away from the critical points, where roots merge
        let cp = p.critical_data().critical_points;
        prop_assume!(cp.iter().all(|q| (q - z).norm() > 1e-2 * q.norm()));
        let w = p.eval_map(z).unwrap();
        let back = p.preimages(w).unwrap();
        let err = back.iter().map(|b| (b - z).norm()).fold(f64::INFINITY, f64::min);
        prop_assert!(err < 1e-7 * z.norm().max(1.0), "{:e}", err);
    }

    #[test]
    fn rotation_conjugates(pair in 0..4usize, s in unit(), t in unit(), r in 0.1..10.0f64, a in -PI..PI) {
        let p = param_in_w(pair, s, t);
        let res = p.check_rotational_symmetry(Complex64::from_polar(r, a)).unwrap();
        prop_assert!(res < 1e-9, "{:e}", res);
    }

    #[test]
    fn derivative_vanishes_at_critical_points(pair in 0..4usize, s in unit(), t in unit()) {
        let p = param_in_w(pair, s, t);
        let data = p.critical_data();
        prop_assert_eq!(data.critical_points.len(), p.m() as usize);
        for z in &data.critical_points {
            let scale = (p.n() as f64) * z.norm().powi(p.n() as i32 - 1);
            prop_assert!(p.eval_derivative(*z).unwrap().norm() < 1e-10 * scale);
        }
        prop_assert_eq!(data.critical_values.len(), (p.m() / p.gcd()) as usize);
    }

    #[test]
    fn winding_flips_under_reversal(cx in -2.0..2.0f64, cy in -2.0..2.0f64, r in 0.1..3.0f64, px in -4.0..4.0f64, py in -4.0..4.0f64) {
        let circle = Curve::circle(c(cx, cy), r, 200, "c");
        let z = c(px, py);
        prop_assume!(((z - c(cx, cy)).norm() - r).abs() > 0.05);
        let w = winding_number(&circle, z).unwrap();
        prop_assert_eq!(w, if (z - c(cx, cy)).norm() < r { 1 } else { 0 });
        prop_assert_eq!(winding_number(&circle.reversed(), z).unwrap(), -w);
    }

    #[test]
    fn pacman_membership_matches_margins(pair in 0..4usize, s in unit(), t in unit(), r in 0.0..3.0f64, a in -PI..PI) {
        let p = param_in_w(pair, s, t);
        let z = Complex64::from_polar(r, a);
        for region in [corrected_pacman(&p, 0.01).unwrap(), legacy_pacman(&p).unwrap()] {
            let inside = region.radial_margin(z) > 0.0 && region.angular_margin(z) > 0.0;
            prop_assert_eq!(region.contains(z), inside);
            // middle of the mouth, whichever branch its argument lands on
            let gap = 2.0 * PI - (region.theta1 - region.theta2);
            let mouth = region.theta1 + 0.5 * gap;
            for k in -1..=1 {
                let z = Complex64::from_polar(0.5 * region.radius, mouth + 2.0 * PI * k as f64);
                prop_assert!(!region.contains(z));
            }
        }
    }

    #[test]
    fn modulus_is_unimodal_on_rays(pair in 0..4usize, s in unit(), t in unit(), a in -PI..PI) {
        let p = param_in_w(pair, s, t);
        let rmin = ray_min_radius(&p, a);
        let f = |r: f64| p.eval_map(Complex64::from_polar(r, a)).unwrap().norm();
        let mut prev = f(rmin);
        for k in 1..=40 {
            let r = rmin * (1.0 + 0.1 * k as f64);
            let v = f(r);
            prop_assert!(v >= prev * (1.0 - 1e-12));
            prev = v;
        }
        let mut prev = f(rmin);
        for k in 1..=40 {
            let r = rmin / (1.0 + 0.1 * k as f64);
            let v = f(r);
            prop_assert!(v >= prev * (1.0 - 1e-12));
            prev = v;
        }
    }

    #[test]
    fn disk_contour_is_single_closed_curve(cx in -0.5..0.5f64, cy in -0.5..0.5f64, r in 0.3..1.0f64) {
        let centre = c(cx, cy);
        let rect = Rect::centered(c(0.0, 0.0), 2.0, 2.0);
        let curves = extract_contour(|z| (z - centre).norm() < r, rect, 128).unwrap();
        prop_assert_eq!(curves.len(), 1);
        prop_assert!(curves[0].closed);
        let cell = 4.0 / 128.0;
        for z in &curves[0].samples {
            prop_assert!(((z - centre).norm() - r).abs() < cell);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn monodromy_at_large_radius(pair in 0..4usize, s in unit(), t in unit(), extra in 0.01..1.0f64) {
        let p = param_in_w(pair, s, t);
        let radius = 2.0 + extra;
        let tracks = continue_roots(
            |u| Polynomial::preimage_trinomial(p.m() as usize, p.d() as usize, Complex64::from_polar(radius, 2.0 * PI * u), p.lambda()),
            &ContinuationOptions::default(),
        ).unwrap();
        let mut want = vec![p.n() as usize, p.d() as usize];
        want.sort_unstable();
        prop_assert_eq!(tracks.cycle_type(), Some(want));
    }
}

#[test]
fn rotational_symmetry_on_annulus() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for (n, d) in PAIRS {
        let p = build_w(n, d).unwrap().center();
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let r = (rng.random_range(0.1f64.ln()..10.0f64.ln())).exp();
            let z = Complex64::from_polar(r, rng.random_range(-PI..PI));
            worst = worst.max(p.check_rotational_symmetry(z).unwrap());
        }
        assert!(worst < 1e-9, "({n},{d}) {worst:e}");
    }
}
