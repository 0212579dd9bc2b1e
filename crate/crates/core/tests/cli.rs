use std::path::Path;
use std::process::{Command, Output};

use halo_core::certify::CertificationReport;

fn halo(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_halo"))
        .args(args)
        .current_dir(dir)
        .env_remove("HALO_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const QUICK: [&str; 6] = ["--grid", "5", "--samples", "100", "--boundary-steps", "256"];

#[test]
fn certify_writes_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let mut args = vec!["certify", "--n", "3", "--d", "4", "--out", out];
    args.extend(QUICK);
    let o = halo(&args, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("certify_n3_d4.json")).unwrap();
    let report: CertificationReport = serde_json::from_str(&text).unwrap();
    assert!(report.overall);
    assert_eq!((report.n, report.d, report.grid), (3, 4, 5));
    assert_eq!(report.lambda_samples.len(), 25);
    let table = String::from_utf8_lossy(&o.stdout);
    assert!(table.contains("degree_two"));
}

#[test]
fn certify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for sub in [&a, &b] {
        let mut args = vec!["certify", "--n", "2", "--d", "5", "--out", sub.to_str().unwrap()];
        args.extend(QUICK);
        assert_eq!(halo(&args, dir.path()).status.code(), Some(0));
    }
    let ra = std::fs::read(a.join("certify_n2_d5.json")).unwrap();
    let rb = std::fs::read(b.join("certify_n2_d5.json")).unwrap();
    assert_eq!(ra, rb);
}

#[test]
fn inadmissible_exponents_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = halo(&["certify", "--n", "3", "--d", "3"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("n != d"), "{}", stderr(&o));
    let o = halo(&["certify", "--n", "1", "--d", "3"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("at least 2"), "{}", stderr(&o));
}

#[test]
fn missing_exponent_prints_usage() {
    let dir = tempfile::tempdir().unwrap();
    let o = halo(&["certify", "--d", "4"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).to_lowercase().contains("usage"), "{}", stderr(&o));
}

#[test]
fn bad_flags_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["render-dyn", "--n", "3", "--d", "4", "--lambda", "1+"][..],
        &["render-dyn", "--n", "3", "--d", "4", "--lambda", "5+0i"][..],
        &["certify", "--n", "3", "--d", "4", "--tol", "1e-3"][..],
        &["render-param", "--n", "3", "--d", "4", "--pixels", "0x10"][..],
        &["certify", "--n", "3", "--d", "4", "--grid", "3"][..],
        &["render-param", "--n", "3", "--d", "4", "--pixels", "30x20"][..],
        &["frobnicate"][..],
    ] {
        let o = halo(args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn render_param_png() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("param.png");
    let o = halo(
        &["render-param", "--n", "3", "--d", "4", "--pixels", "64x48", "--viewport", "0,0,2,1.5", "--max-iter", "200", "--out", file.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let img = halo_core::render::read_png(&file).unwrap();
    assert_eq!((img.width, img.height), (64, 48));
}

#[test]
fn render_dyn_ppm_header() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("dyn.ppm");
    let o = halo(
        &[
            "render-dyn", "--n", "3", "--d", "4", "--lambda", "0.3+0.0i", "--pixels", "40x40", "--max-iter", "100",
            "--out", file.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let bytes = std::fs::read(&file).unwrap();
    let header = b"P6\n40 40\n255\n";
    assert_eq!(&bytes[..header.len()], header);
    assert_eq!(bytes.len(), header.len() + 40 * 40 * 3);
}

#[test]
fn error_demo_reproduces() {
    let dir = tempfile::tempdir().unwrap();
    let o = halo(
        &["error-demo", "--n", "3", "--d", "4", "--pixels", "60x60", "--max-iter", "100", "--out", dir.path().to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let img = halo_core::render::read_png(&dir.path().join("error_demo_n3_d4.png")).unwrap();
    assert_eq!((img.width, img.height), (120, 60));
}

#[test]
fn out_dir_from_environment_and_config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let env_dir = dir.path().join("env");
    let cfg_dir = dir.path().join("cfg");
    std::fs::create_dir_all(&env_dir).unwrap();
    std::fs::create_dir_all(&cfg_dir).unwrap();
    let run = |extra: &[&str]| {
        let mut args = vec!["error-demo", "--n", "3", "--d", "4", "--pixels", "20x20", "--max-iter", "100"];
        args.extend(extra);
        Command::new(env!("CARGO_BIN_EXE_halo"))
            .args(&args)
            .current_dir(dir.path())
            .env("HALO_OUT_DIR", &env_dir)
            .output()
            .unwrap()
    };
    assert_eq!(run(&[]).status.code(), Some(0));
    assert!(env_dir.join("error_demo_n3_d4.png").exists());

    let cfg = dir.path().join("halo.cfg");
    std::fs::write(&cfg, format!("# settings\nout = {}\npixels = 30x30\n", cfg_dir.display())).unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap()]).status.code(), Some(0));
    let img = halo_core::render::read_png(&cfg_dir.join("error_demo_n3_d4.png")).unwrap();
    // --pixels on the command line beats the file
    assert_eq!(img.height, 20);
}
