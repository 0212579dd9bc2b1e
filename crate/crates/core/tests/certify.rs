use halo_core::certify::{
    certify_parameter, check_legacy_failure, critical_value_winding, run_full_certification,
    CertificationReport, CertifyOptions, DEFAULT_SEED,
};
use halo_core::regions::{build_w, RegionOptions, RegionSystem};
use rayon::prelude::*;

const PAIRS: [(u32, u32); 4] = [(3, 4), (4, 3), (2, 5), (5, 2)];

#[test]
fn full_certification_round_trips() {
    let opts = CertifyOptions {
        grid: 5,
        samples: 100,
        ..CertifyOptions::default()
    };
    let report = run_full_certification(5, 2, &opts).unwrap();
    assert!(report.overall, "{:?}", report.summary());
    assert!(report.checks.iter().all(|c| c.margin.is_finite()));
    let text = serde_json::to_string_pretty(&report).unwrap();
    let back: CertificationReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);
}

#[test]
fn winding_stable_under_doubling() {
    for (n, d) in PAIRS {
        assert_eq!(critical_value_winding(n, d, 256).unwrap(), 1);
        assert_eq!(critical_value_winding(n, d, 512).unwrap(), 1);
        // ten times the minimum resolution agrees
        assert_eq!(critical_value_winding(n, d, 2560).unwrap(), 1);
    }
}

#[test]
fn legacy_fails_across_the_grid() {
    for (n, d) in PAIRS {
        let opts = RegionOptions::default();
        let failed: Vec<bool> = build_w(n, d)
            .unwrap()
            .grid(9)
            .par_iter()
            .map(|p| {
                let rs = RegionSystem::build(p, &opts).unwrap();
                check_legacy_failure(&rs, 200, DEFAULT_SEED).passed
            })
            .collect();
        let count = failed.iter().filter(|&&f| f).count();
        assert_eq!(count, failed.len(), "({n},{d}) older regions 2-to-1 at some parameter");
    }
}

#[test]
fn positive_margins_survive_finer_sampling() {
    let coarse = CertifyOptions::default();
    let fine = CertifyOptions {
        region: RegionOptions {
            curve_points: 2 * coarse.region.curve_points,
            continuation_steps: 2 * coarse.region.continuation_steps,
            ..coarse.region.clone()
        },
        ..coarse.clone()
    };
    for (n, d) in PAIRS {
        let p = build_w(n, d).unwrap().center();
        let a = certify_parameter(&p, &coarse);
        let b = certify_parameter(&p, &fine);
        for (x, y) in a.iter().zip(&b) {
            assert!(x.passed && y.passed, "({n},{d}) {}", x.name);
            assert!(y.margin > 0.5 * x.margin, "({n},{d}) {}: {} vs {}", x.name, x.margin, y.margin);
        }
    }
}
