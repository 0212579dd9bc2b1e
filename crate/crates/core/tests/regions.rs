use std::f64::consts::PI;

use halo_core::family::MapParams;
use halo_core::numerics::{curve_distance, hausdorff_distance, RadialProfile};
use halo_core::regions::{
    build_w, preimage_pair, select_epsilon, RegionOptions, RegionSystem,
};
use num_complex::Complex64;
use rayon::prelude::*;

const PAIRS: [(u32, u32); 4] = [(3, 4), (4, 3), (2, 5), (5, 2)];

fn systems(n: u32, d: u32, grid: usize) -> Vec<RegionSystem> {
    let opts = RegionOptions::default();
    build_w(n, d)
        .unwrap()
        .grid(grid)
        .par_iter()
        .map(|p| RegionSystem::build(p, &opts).unwrap())
        .collect()
}

#[test]
fn w_radii_against_closed_forms() {
    // (3,4): m = 7
    let w = build_w(3, 4).unwrap();
    let r_in = (3.0f64 / 4.0) * (4.0f64 / 14.0).powf(28.0 / 5.0);
    let r_out = (3.0f64 / 4.0) * (8.0f64 / 7.0).powf(7.0 / 3.0);
    assert!((w.r_inner / r_in - 1.0).abs() < 1e-13);
    assert!((w.r_outer / r_out - 1.0).abs() < 1e-13);
    assert!((w.arg_max - PI / 2.0).abs() < 1e-15);
    for n in 2..=10u32 {
        for d in 2..=10u32 {
            if let Ok(w) = build_w(n, d) {
                assert!(0.0 < w.r_inner && w.r_inner < w.r_outer, "({n},{d})");
            }
        }
    }
}

#[test]
fn theta_margin_positive_inside_w() {
    for (n, d) in PAIRS {
        for p in build_w(n, d).unwrap().grid(21) {
            assert!(halo_core::certify::theta_margin(&p) > 0.0, "({n},{d}) lambda {}", p.lambda());
        }
    }
}

#[test]
fn hatted_curves_lie_between() {
    for (n, d) in PAIRS {
        for rs in systems(n, d, 5) {
            let p = &rs.params;
            let level = rs.level();
            for z in rs.gamma_hat_n.samples.iter().chain(&rs.gamma_hat_d.samples) {
                let v = p.eval_map(*z).unwrap().norm();
                assert!((v - level).abs() < 1e-8, "({n},{d}) |F| = {v}, level {level}");
            }
            // radial order at every angle
            let c = p.critical_radius();
            let hn = RadialProfile::from_curve(&rs.gamma_hat_n).unwrap();
            let hd = RadialProfile::from_curve(&rs.gamma_hat_d).unwrap();
            let gd = RadialProfile::from_curve(&rs.gamma_d).unwrap();
            for k in 0..360 {
                let a = -PI + 2.0 * PI * k as f64 / 360.0;
                let (rhn, rhd, rgd) = (hn.radius_at(a), hd.radius_at(a), gd.radius_at(a));
                assert!(p.mu_radius() < rhd && rhd < c && c < rhn && rhn < level, "({n},{d}) angle {a}");
                assert!(rhd < rgd, "({n},{d}) gamma_hat_d must sit inside gamma_d");
            }
            for (a, b) in [
                (&rs.gamma_hat_n, &rs.gamma),
                (&rs.gamma_hat_d, &rs.mu),
                (&rs.gamma_hat_n, &rs.gamma_hat_d),
            ] {
                assert!(curve_distance(a, b).unwrap() > 0.0);
            }
        }
    }
}

#[test]
fn epsilon_stable_under_doubled_sampling() {
    let coarse = RegionOptions::default();
    let fine = RegionOptions {
        curve_points: 2 * coarse.curve_points,
        continuation_steps: 2 * coarse.continuation_steps,
        ..coarse.clone()
    };
    for (n, d) in PAIRS {
        let p = build_w(n, d).unwrap().center();
        let a = select_epsilon(&p, &coarse).unwrap();
        let b = select_epsilon(&p, &fine).unwrap();
        let ratio = a.epsilon / b.epsilon;
        assert!((0.5..=2.0).contains(&ratio), "({n},{d}) {} vs {}", a.epsilon, b.epsilon);
        assert!((a.delta1 / b.delta1 - 1.0).abs() < 0.05);
        assert!((a.delta2 / b.delta2 - 1.0).abs() < 0.05);
    }
}

#[test]
fn hausdorff_shrinks_with_epsilon() {
    let opts = RegionOptions::default();
    for (n, d) in PAIRS {
        let p = build_w(n, d).unwrap().center();
        let base = preimage_pair(&p, 2.0, &opts).unwrap();
        let mut last = (f64::INFINITY, f64::INFINITY);
        for eps in [0.1, 0.05, 0.025] {
            let pair = preimage_pair(&p, 2.0 + eps, &opts).unwrap();
            let h = (
                hausdorff_distance(&pair.outer, &base.outer).unwrap(),
                hausdorff_distance(&pair.inner, &base.inner).unwrap(),
            );
            assert!(h.0 < last.0 && h.1 < last.1, "({n},{d}) eps {eps}: {h:?} vs {last:?}");
            last = h;
        }
    }
}

#[test]
fn epsilon_positive_around_w_boundary() {
    let opts = RegionOptions::default();
    for (n, d) in PAIRS {
        let boundary = build_w(n, d).unwrap().boundary(64).unwrap();
        let ok: Vec<bool> = boundary
            .par_iter()
            .map(|b| {
                let e = select_epsilon(&b.params, &opts).unwrap();
                e.delta1 > 0.0 && e.delta2 > 0.0 && e.epsilon > 0.0
            })
            .collect();
        assert!(ok.iter().all(|&x| x), "({n},{d})");
    }
}

#[test]
fn critical_point_inside_u_hat_prime() {
    for (n, d) in PAIRS {
        for rs in systems(n, d, 9) {
            let c0 = rs.params.critical_point();
            assert!(rs.in_u_hat_prime(c0), "({n},{d}) lambda {}", rs.params.lambda());
            assert!(rs.in_u_hat(rs.params.critical_value()));
        }
    }
}

#[test]
fn u_hat_prime_maps_into_u_hat() {
    for (n, d) in PAIRS {
        let rs = &systems(n, d, 5)[12];
        let contour = rs.u_hat_prime_contour(256).unwrap();
        assert_eq!(contour.curves.len(), 1, "({n},{d})");
        let p = &rs.params;
        let mut worst = 0.0f64;
        for z in &contour.curves[0].samples {
            let w = p.eval_map(*z).unwrap();
            let h = contour.cell_size_at(*z) * p.eval_derivative(*z).unwrap().norm();
            worst = worst.max(rs.u_hat.boundary_distance(w) / h);
        }
        // each contour sample is within one grid cell of the boundary
        assert!(worst < 1.0, "({n},{d}) {worst}");
        // interior points of U-hat' land in U-hat
        let lo = rs.gamma_hat_d.min_modulus();
        let hi = rs.gamma_hat_n.max_modulus();
        for i in 0..40 {
            for j in 0..40 {
                let r = lo * (hi / lo).powf((i as f64 + 0.5) / 40.0);
                let z = Complex64::from_polar(r, -PI + 2.0 * PI * (j as f64 + 0.5) / 40.0);
                if rs.in_u_hat_prime(z) {
                    assert!(rs.u_hat.contains(p.eval_map(z).unwrap()));
                    assert!(rs.in_v_prime(z));
                }
            }
        }
    }
}

#[test]
fn prepoles_on_the_sector_boundary() {
    // the prepoles -lambda^{1/m} nu^j lie on the sector rays
    for (n, d) in PAIRS {
        for p in build_w(n, d).unwrap().grid(5) {
            let (a, b) = halo_core::regions::sector_rays(&p);
            let hits = p
                .critical_data()
                .prepoles
                .iter()
                .filter(|z| {
                    let t = z.arg();
                    [a, b].iter().any(|r| halo_core::numerics::wrap_angle(t - r).abs() < 1e-12)
                })
                .count();
            assert_eq!(hits, 2, "({n},{d}) lambda {}", p.lambda());
        }
    }
}

#[test]
fn sector_margin_vanishes_at_corners_when_an_exponent_is_two() {
    // containment margin is exactly zero at the Arg endpoints of W
    for (n, d) in [(5u32, 2u32), (2, 5)] {
        let w = build_w(n, d).unwrap();
        let corner = MapParams::from_polar(n, d, w.r_outer, w.arg_max).unwrap();
        let other = MapParams::from_polar(n, d, w.r_outer, w.arg_min).unwrap();
        let worst = halo_core::certify::theta_margin(&corner).min(halo_core::certify::theta_margin(&other));
        assert!(worst.abs() < 1e-12, "({n},{d}) {worst}");
    }
    for (n, d) in [(3u32, 4u32), (4, 3)] {
        let (margin, _) = halo_core::certify::theta_sweep(n, d, 1001).unwrap();
        assert!(margin > 0.1, "({n},{d}) {margin}");
    }
}
