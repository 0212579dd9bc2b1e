//! The `halo` command line: configuration merging and the four subcommands.
//!
//! Exit codes: 0 success, 1 check failure or I/O error, 2 invalid arguments.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand};
use num_complex::Complex64;

use crate::certify::{
    check_degree_two, check_original_ray_error, run_full_certification, CertifyOptions,
    RegionKind, DEFAULT_SEED,
};
use crate::error::Error;
use crate::family::{check_admissible, MapParams};
use crate::regions::{build_w, RegionOptions, RegionSystem};
use crate::render::{
    dynamical_viewport, parameter_viewport, render_covering_panel, render_dynamical_plane,
    render_parameter_plane, write_image, ImageFormat, Viewport, DEFAULT_ESCAPE_RADIUS,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const OUT_DIR_ENV: &str = "HALO_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "halo", version, about = "Polynomial-like regions for z^n + lambda/z^d")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check every region statement over a grid in W and around its boundary.
    Certify(Flags),
    /// Escape-time picture of the lambda plane.
    RenderParam(Flags),
    /// Escape-time picture of the dynamical plane with region overlays.
    RenderDyn(Flags),
    /// Reproduce the failure of the older construction.
    ErrorDemo(Flags),
}

#[derive(Debug, Default, Args)]
struct Flags {
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    d: Option<u32>,
    /// Complex parameter written as a+bi.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    boundary_steps: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    curve_points: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// cx,cy,w,h
    #[arg(long, allow_hyphen_values = true)]
    viewport: Option<String>,
    /// WxH
    #[arg(long)]
    pixels: Option<String>,
    #[arg(long)]
    max_iter: Option<u32>,
    /// Output directory for certify and error-demo, output file for renders.
    #[arg(long)]
    out: Option<PathBuf>,
    /// ppm or png.
    #[arg(long)]
    format: Option<String>,
    /// File of key=value lines; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Fully resolved settings.
#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub n: Option<u32>,
    pub d: Option<u32>,
    pub lambda: Option<Complex64>,
    pub grid: usize,
    pub boundary_steps: usize,
    pub samples: usize,
    pub curve_points: usize,
    pub tol: f64,
    pub seed: u64,
    pub viewport: Option<(Complex64, f64, f64)>,
    pub pixels: (usize, usize),
    pub max_iter: u32,
    pub out: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub format: Option<ImageFormat>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            n: None,
            d: None,
            lambda: None,
            grid: 9,
            boundary_steps: 256,
            samples: 200,
            curve_points: 1024,
            tol: crate::numerics::DEFAULT_TOL,
            seed: DEFAULT_SEED,
            viewport: None,
            pixels: (800, 800),
            max_iter: 1000,
            out: None,
            out_dir: PathBuf::from("."),
            format: None,
        }
    }
}

impl Config {
    fn region_options(&self) -> RegionOptions {
        RegionOptions {
            curve_points: self.curve_points,
            continuation_steps: crate::numerics::continuation::DEFAULT_STEPS,
            tol: self.tol,
        }
    }

    fn exponents(&self) -> Result<(u32, u32), String> {
        let n = self.n.ok_or("missing --n")?;
        let d = self.d.ok_or("missing --d")?;
        check_admissible(n, d).map_err(|e| e.to_string())?;
        Ok((n, d))
    }
}

/// Parses `a+bi`, `a-bi`, `a`, `bi`, `i`, `-i`, with optional exponents.
pub fn parse_lambda(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse {s:?} as a+bi");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

fn parse_viewport(s: &str) -> Result<(Complex64, f64, f64), String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("cannot parse viewport {s:?}; expected cx,cy,w,h"))?;
    match parts[..] {
        [cx, cy, w, h] if w > 0.0 && h > 0.0 => Ok((Complex64::new(cx, cy), w, h)),
        _ => Err(format!("viewport {s:?} needs cx,cy,w,h with positive w and h")),
    }
}

fn parse_pixels(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("cannot parse pixels {s:?}; expected WxH"))?;
    let w: usize = w.trim().parse().map_err(|_| format!("bad pixel width in {s:?}"))?;
    let h: usize = h.trim().parse().map_err(|_| format!("bad pixel height in {s:?}"))?;
    if w == 0 || h == 0 {
        return Err(format!("pixels {s:?} must be positive"));
    }
    Ok((w, h))
}

/// Reads `key=value` lines; `#` starts a comment. Keys may use `-` or `_`.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", k + 1))?;
        out.insert(key.trim().replace('-', "_"), value.trim().to_string());
    }
    Ok(out)
}

fn apply(cfg: &mut Config, key: &str, value: &str) -> Result<(), String> {
    fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String> {
        v.parse().map_err(|_| format!("bad value {v:?} for {key}"))
    }
    match key {
        "n" => cfg.n = Some(num(key, value)?),
        "d" => cfg.d = Some(num(key, value)?),
        "lambda" => cfg.lambda = Some(parse_lambda(value)?),
        "grid" => cfg.grid = num(key, value)?,
        "boundary_steps" => cfg.boundary_steps = num(key, value)?,
        "samples" => cfg.samples = num(key, value)?,
        "curve_points" => cfg.curve_points = num(key, value)?,
        "tol" => cfg.tol = num(key, value)?,
        "seed" => cfg.seed = num(key, value)?,
        "viewport" => cfg.viewport = Some(parse_viewport(value)?),
        "pixels" => cfg.pixels = parse_pixels(value)?,
        "max_iter" => cfg.max_iter = num(key, value)?,
        "out" => cfg.out = Some(PathBuf::from(value)),
        "format" => cfg.format = Some(value.parse().map_err(|e: Error| e.to_string())?),
        other => return Err(format!("unknown config key {other:?}")),
    }
    Ok(())
}

/// Default < environment < config file < flags.
fn resolve(flags: &Flags, env_out: Option<OsString>) -> Result<Config, String> {
    let mut cfg = Config::default();
    if let Some(dir) = env_out {
        cfg.out_dir = PathBuf::from(dir);
    }
    if let Some(path) = &flags.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        for (k, v) in parse_config_file(&text)? {
            apply(&mut cfg, &k, &v)?;
        }
    }
    let pairs: [(&str, Option<String>); 14] = [
        ("n", flags.n.map(|v| v.to_string())),
        ("d", flags.d.map(|v| v.to_string())),
        ("lambda", flags.lambda.clone()),
        ("grid", flags.grid.map(|v| v.to_string())),
        ("boundary_steps", flags.boundary_steps.map(|v| v.to_string())),
        ("samples", flags.samples.map(|v| v.to_string())),
        ("curve_points", flags.curve_points.map(|v| v.to_string())),
        ("tol", flags.tol.map(|v| format!("{v:e}"))),
        ("seed", flags.seed.map(|v| v.to_string())),
        ("viewport", flags.viewport.clone()),
        ("pixels", flags.pixels.clone()),
        ("max_iter", flags.max_iter.map(|v| v.to_string())),
        ("out", flags.out.as_ref().map(|p| p.display().to_string())),
        ("format", flags.format.clone()),
    ];
    for (k, v) in pairs {
        if let Some(v) = v {
            apply(&mut cfg, k, &v)?;
        }
    }
    if !(cfg.tol > 0.0 && cfg.tol <= 1e-6) {
        return Err(format!("tol {} outside (0, 1e-6]", cfg.tol));
    }
    Ok(cfg)
}

/// Runs the CLI on `args` (program name first); returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let (name, flags) = match &cli.command {
        Command::Certify(f) => ("certify", f),
        Command::RenderParam(f) => ("render-param", f),
        Command::RenderDyn(f) => ("render-dyn", f),
        Command::ErrorDemo(f) => ("error-demo", f),
    };
    let usage = || {
        let mut cmd = Cli::command();
        cmd.find_subcommand_mut(name)
            .map(|c| c.render_usage().to_string())
            .unwrap_or_default()
    };
    let cfg = match resolve(flags, std::env::var_os(OUT_DIR_ENV)) {
        Ok(c) => c,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}\n\n{}", usage());
            return EXIT_USAGE;
        }
    };
    let (n, d) = match cfg.exponents() {
        Ok(nd) => nd,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}\n\n{}", usage());
            return EXIT_USAGE;
        }
    };
    let outcome = match cli.command {
        Command::Certify(_) => cmd_certify(&cfg, n, d, out),
        Command::RenderParam(_) => cmd_render_param(&cfg, n, d, out),
        Command::RenderDyn(_) => cmd_render_dyn(&cfg, n, d, out),
        Command::ErrorDemo(_) => cmd_error_demo(&cfg, n, d, out),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_FAILURE
        }
    }
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::Inadmissible(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn usage_err(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", dir.display())))
}

fn out_dir(cfg: &Config) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| cfg.out_dir.clone())
}

fn image_path(cfg: &Config, default_name: &str) -> (PathBuf, ImageFormat) {
    let path = cfg.out.clone().unwrap_or_else(|| {
        let ext = match cfg.format {
            Some(ImageFormat::Ppm) => "ppm",
            _ => "png",
        };
        cfg.out_dir.join(format!("{default_name}.{ext}"))
    });
    let format = cfg.format.unwrap_or_else(|| ImageFormat::from_path(&path));
    (path, format)
}

fn viewport(cfg: &Config, default: impl FnOnce(usize) -> crate::Result<Viewport>) -> Result<Viewport, Failure> {
    let (px, py) = cfg.pixels;
    match cfg.viewport {
        Some((c, w, h)) => Ok(Viewport::new(c, w, h, px, py)?),
        None => {
            if px != py {
                return Err(usage_err("non-square --pixels needs an explicit --viewport"));
            }
            Ok(default(px)?)
        }
    }
}

fn lambda_params(cfg: &Config, n: u32, d: u32) -> Result<MapParams, Failure> {
    let w = build_w(n, d)?;
    let p = match cfg.lambda {
        Some(l) => MapParams::new(n, d, l)?,
        None => w.center(),
    };
    if !w.contains_closure(p.lambda()) {
        return Err(usage_err(format!(
            "lambda = {} is outside W: {} <= |lambda| <= {}, |Arg lambda| <= {}",
            p.lambda(),
            w.r_inner,
            w.r_outer,
            w.arg_max
        )));
    }
    Ok(p)
}

fn cmd_certify(cfg: &Config, n: u32, d: u32, out: &mut dyn Write) -> Result<i32, Failure> {
    let opts = CertifyOptions {
        grid: cfg.grid,
        boundary_steps: cfg.boundary_steps,
        samples: cfg.samples,
        seed: cfg.seed,
        region: cfg.region_options(),
    };
    let report = run_full_certification(n, d, &opts)?;
    let dir = out_dir(cfg);
    ensure_dir(&dir)?;
    let path = dir.join(format!("certify_n{n}_d{d}.json"));
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    std::fs::write(&path, json + "\n")
        .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))?;
    let _ = writeln!(out, "{:<24} {:>9} {:>12}", "check", "passed", "min margin");
    for (name, passed, total, margin) in report.summary() {
        let _ = writeln!(out, "{name:<24} {:>9} {margin:>12.3e}", format!("{passed}/{total}"));
    }
    let _ = writeln!(
        out,
        "overall: {}\nreport: {}",
        if report.overall { "PASS" } else { "FAIL" },
        path.display()
    );
    Ok(if report.overall { EXIT_OK } else { EXIT_FAILURE })
}

fn save(img: &crate::render::RasterImage, path: &Path, format: ImageFormat, out: &mut dyn Write) -> Result<i32, Failure> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    write_image(img, path, format).map_err(|e| Failure::Runtime(e.to_string()))?;
    let _ = writeln!(out, "wrote {}", path.display());
    Ok(EXIT_OK)
}

fn cmd_render_param(cfg: &Config, n: u32, d: u32, out: &mut dyn Write) -> Result<i32, Failure> {
    let w = build_w(n, d)?;
    let vp = viewport(cfg, |px| parameter_viewport(&w, px))?;
    let img = render_parameter_plane(n, d, &vp, cfg.max_iter, DEFAULT_ESCAPE_RADIUS)?;
    let (path, format) = image_path(cfg, &format!("param_n{n}_d{d}"));
    save(&img, &path, format, out)
}

fn cmd_render_dyn(cfg: &Config, n: u32, d: u32, out: &mut dyn Write) -> Result<i32, Failure> {
    let p = lambda_params(cfg, n, d)?;
    let rs = RegionSystem::build(&p, &cfg.region_options())?;
    let vp = viewport(cfg, |px| dynamical_viewport(&rs, px))?;
    let img = render_dynamical_plane(&rs, &vp, cfg.max_iter)?;
    let (path, format) = image_path(cfg, &format!("dyn_n{n}_d{d}"));
    save(&img, &path, format, out)
}

fn cmd_error_demo(cfg: &Config, n: u32, d: u32, out: &mut dyn Write) -> Result<i32, Failure> {
    let p = lambda_params(cfg, n, d)?;
    let rs = RegionSystem::build(&p, &cfg.region_options())?;
    let rays = check_original_ray_error(&p, 512);
    let legacy = check_degree_two(&rs, cfg.samples, cfg.seed, RegionKind::Legacy);
    let corrected = check_degree_two(&rs, cfg.samples, cfg.seed, RegionKind::Corrected);
    for (label, r) in [
        ("ray images", &rays),
        ("older regions 2-to-1", &legacy),
        ("corrected regions 2-to-1", &corrected),
    ] {
        let _ = writeln!(
            out,
            "{label:<26} {:<5} margin {:>10.3e}  {}",
            if r.passed { "yes" } else { "no" },
            r.margin,
            r.details
        );
    }
    let vp = viewport(cfg, |px| dynamical_viewport(&rs, px))?;
    let panel = render_covering_panel(&rs, &vp, cfg.max_iter)?;
    let dir = out_dir(cfg);
    let ext = match cfg.format {
        Some(ImageFormat::Ppm) => "ppm",
        _ => "png",
    };
    let path = dir.join(format!("error_demo_n{n}_d{d}.{ext}"));
    save(&panel, &path, cfg.format.unwrap_or(ImageFormat::Png), out)?;
    let reproduced = rays.passed && !legacy.passed && corrected.passed;
    let _ = writeln!(
        out,
        "error reproduced: {}",
        if reproduced { "yes" } else { "no" }
    );
    Ok(if reproduced { EXIT_OK } else { EXIT_FAILURE })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_forms() {
        assert_eq!(parse_lambda("0.3+0.0i").unwrap(), Complex64::new(0.3, 0.0));
        assert_eq!(parse_lambda("0.3-0.2i").unwrap(), Complex64::new(0.3, -0.2));
        assert_eq!(parse_lambda("-1e-3+2E-4i").unwrap(), Complex64::new(-1e-3, 2e-4));
        assert_eq!(parse_lambda("1.5e-3-i").unwrap(), Complex64::new(1.5e-3, -1.0));
        assert_eq!(parse_lambda("-0.5i").unwrap(), Complex64::new(0.0, -0.5));
        assert_eq!(parse_lambda("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_lambda(" 2 ").unwrap(), Complex64::new(2.0, 0.0));
        assert!(parse_lambda("abc").is_err());
        assert!(parse_lambda("").is_err());
        assert!(parse_lambda("1+2j").is_err());
    }

    #[test]
    fn viewport_and_pixels() {
        assert_eq!(parse_viewport("0,-1,4,2").unwrap(), (Complex64::new(0.0, -1.0), 4.0, 2.0));
        assert!(parse_viewport("0,0,4").is_err());
        assert!(parse_viewport("0,0,-4,4").is_err());
        assert_eq!(parse_pixels("640x480").unwrap(), (640, 480));
        assert!(parse_pixels("640").is_err());
        assert!(parse_pixels("0x5").is_err());
    }

    #[test]
    fn config_file_and_precedence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("halo.cfg");
        std::fs::write(&path, "# comment\nn = 5\nd=2\ngrid = 7\nboundary-steps = 512 # trailing\n").unwrap();
        let flags = Flags {
            config: Some(path.clone()),
            grid: Some(11),
            ..Default::default()
        };
        let cfg = resolve(&flags, Some("env_dir".into())).unwrap();
        assert_eq!((cfg.n, cfg.d), (Some(5), Some(2)));
        assert_eq!(cfg.grid, 11);
        assert_eq!(cfg.boundary_steps, 512);
        assert_eq!(cfg.samples, 200);
        assert_eq!(cfg.out_dir, PathBuf::from("env_dir"));
        std::fs::write(&path, "colour = red\n").unwrap();
        assert!(resolve(&flags, None).is_err());
        std::fs::write(&path, "no equals sign\n").unwrap();
        assert!(resolve(&flags, None).is_err());
    }

    #[test]
    fn tolerance_range_enforced() {
        let flags = Flags {
            tol: Some(0.1),
            ..Default::default()
        };
        assert!(resolve(&flags, None).is_err());
    }
}
