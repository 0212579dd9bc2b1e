//! Escape-time pictures of the parameter plane and the dynamical plane,
//! region overlays, and PPM/PNG output.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::MapParams;
use crate::numerics::Curve;
use crate::regions::{sector_rays, ParamRectangle, RegionSystem};

pub const DEFAULT_ESCAPE_RADIUS: f64 = 10.0;
/// Orbits closer than this to the pole are treated as escaping through the
/// trap door.
pub const POLE_CUTOFF: f64 = 1e-12;
pub const MIN_MAX_ITER: u32 = 100;

pub const BLACK: [u8; 3] = [0, 0, 0];
pub const W_STROKE: [u8; 3] = [255, 255, 255];
pub const SECTOR_STROKE: [u8; 3] = [255, 64, 64];
pub const GAMMA_STROKE: [u8; 3] = [255, 255, 0];
pub const MU_STROKE: [u8; 3] = [0, 255, 255];
pub const GAMMA_HAT_STROKE: [u8; 3] = [255, 160, 0];
pub const GAMMA_HAT_N_STROKE: [u8; 3] = [255, 0, 255];
pub const GAMMA_HAT_D_STROKE: [u8; 3] = [0, 255, 0];
pub const RAY_STROKE: [u8; 3] = [255, 64, 64];
pub const U_HAT_STROKE: [u8; 3] = [255, 255, 255];
pub const U_HAT_PRIME_STROKE: [u8; 3] = [64, 128, 255];
/// Dash period, in pixels, for the dashed circle.
pub const DASH: f64 = 6.0;

/// Entry `k` of the fixed 256-colour escape palette: three phase-shifted
/// integer triangle waves, never pure black.
pub fn palette(k: u8) -> [u8; 3] {
    let tri = |x: u32| -> u8 {
        let x = x % 256;
        let v = if x < 128 { x * 2 } else { (255 - x) * 2 };
        (v.min(255) as u8).max(16)
    };
    let k = k as u32;
    [tri(k * 3 + 40), tri(k * 5 + 100), tri(k * 7 + 200)]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Viewport {
    pub center: Complex64,
    pub width: f64,
    pub height: f64,
    pub pixels_x: usize,
    pub pixels_y: usize,
}

impl Viewport {
    /// Pixels must be square to within `1e-9` relative.
    pub fn new(center: Complex64, width: f64, height: f64, pixels_x: usize, pixels_y: usize) -> Result<Self> {
        if !(width > 0.0 && height > 0.0) || pixels_x == 0 || pixels_y == 0 {
            return Err(Error::InvalidArgument("viewport needs positive size".into()));
        }
        let ratio = (width / height) / (pixels_x as f64 / pixels_y as f64);
        if (ratio - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "viewport aspect {width}x{height} does not match {pixels_x}x{pixels_y} pixels"
            )));
        }
        Ok(Self {
            center,
            width,
            height,
            pixels_x,
            pixels_y,
        })
    }

    /// Square viewport of half-width `half` around `center`.
    pub fn square(center: Complex64, half: f64, pixels: usize) -> Result<Self> {
        Self::new(center, 2.0 * half, 2.0 * half, pixels, pixels)
    }

    pub fn pixel_size(&self) -> f64 {
        self.width / self.pixels_x as f64
    }

    /// Centre of pixel `(i, j)`; row 0 is the top.
    pub fn pixel_to_complex(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(
            self.center.re - 0.5 * self.width + (i as f64 + 0.5) * self.width / self.pixels_x as f64,
            self.center.im + 0.5 * self.height - (j as f64 + 0.5) * self.height / self.pixels_y as f64,
        )
    }

    pub fn complex_to_pixel(&self, z: Complex64) -> Option<(usize, usize)> {
        let x = (z.re - (self.center.re - 0.5 * self.width)) / self.width * self.pixels_x as f64;
        let y = ((self.center.im + 0.5 * self.height) - z.im) / self.height * self.pixels_y as f64;
        if x < 0.0 || y < 0.0 || x >= self.pixels_x as f64 || y >= self.pixels_y as f64 {
            return None;
        }
        Some((x as usize, y as usize))
    }
}

/// Default parameter-plane view: both signs of `Arg lambda` and all of `W`
/// with 20% padding around the outer radius.
pub fn parameter_viewport(w: &ParamRectangle, pixels: usize) -> Result<Viewport> {
    Viewport::square(Complex64::new(0.0, 0.0), 1.2 * w.r_outer, pixels)
}

/// Default dynamical-plane view: `Gamma-hat` with 20% padding.
pub fn dynamical_viewport(rs: &RegionSystem, pixels: usize) -> Result<Viewport> {
    Viewport::square(Complex64::new(0.0, 0.0), 1.2 * rs.level(), pixels)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RasterImage {
    pub width: usize,
    pub height: usize,
    /// Row-major RGB.
    pub pixels: Vec<[u8; 3]>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, fill: [u8; 3]) -> Self {
        Self {
            width,
            height,
            pixels: vec![fill; width * height],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> [u8; 3] {
        self.pixels[j * self.width + i]
    }

    pub fn set(&mut self, i: usize, j: usize, rgb: [u8; 3]) {
        self.pixels[j * self.width + i] = rgb;
    }

    pub fn rgb_bytes(&self) -> Vec<u8> {
        self.pixels.iter().flatten().copied().collect()
    }

    /// Left and right images next to each other; heights must agree.
    pub fn side_by_side(left: &Self, right: &Self) -> Result<Self> {
        if left.height != right.height {
            return Err(Error::InvalidArgument("panel heights differ".into()));
        }
        let mut out = Self::new(left.width + right.width, left.height, BLACK);
        for j in 0..left.height {
            for i in 0..left.width {
                out.set(i, j, left.get(i, j));
            }
            for i in 0..right.width {
                out.set(left.width + i, j, right.get(i, j));
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Escape {
    Bounded,
    /// First iterate with modulus above the escape radius.
    Escaped(u32),
    /// Iterate at which the orbit came within `POLE_CUTOFF` of 0.
    Pole(u32),
}

impl Escape {
    pub fn is_bounded(self) -> bool {
        self == Escape::Bounded
    }

    pub fn color(self) -> [u8; 3] {
        match self {
            Escape::Bounded => BLACK,
            Escape::Escaped(k) | Escape::Pole(k) => palette((k.wrapping_mul(7) % 256) as u8),
        }
    }
}

/// Escape time of the orbit of `z0`. Iterate 0 is `z0` itself.
pub fn orbit_escape(p: &MapParams, z0: Complex64, max_iter: u32, escape_radius: f64) -> Escape {
    let mut z = z0;
    for k in 0..max_iter {
        let r = z.norm();
        if !(r <= escape_radius) {
            return Escape::Escaped(k);
        }
        if r < POLE_CUTOFF {
            return Escape::Pole(k);
        }
        z = p.eval_unchecked(z);
    }
    Escape::Bounded
}

/// Escape time of the critical orbit, seeded at `v_lambda`.
pub fn critical_orbit_escape(p: &MapParams, max_iter: u32, escape_radius: f64) -> Escape {
    orbit_escape(p, p.critical_value(), max_iter, escape_radius)
}

fn check_render_args(max_iter: u32, escape_radius: f64) -> Result<()> {
    if max_iter < MIN_MAX_ITER {
        return Err(Error::InvalidArgument(format!(
            "max_iter {max_iter} below {MIN_MAX_ITER}"
        )));
    }
    if !(escape_radius >= 2.0) {
        return Err(Error::InvalidArgument(format!(
            "escape radius {escape_radius} below 2"
        )));
    }
    Ok(())
}

/// Critical-orbit escape classification of every pixel of the `lambda`
/// plane, row-major.
pub fn parameter_escape_grid(n: u32, d: u32, vp: &Viewport, max_iter: u32, escape_radius: f64) -> Result<Vec<Escape>> {
    check_render_args(max_iter, escape_radius)?;
    crate::family::check_admissible(n, d)?;
    Ok((0..vp.pixels_x * vp.pixels_y)
        .into_par_iter()
        .map(|k| parameter_pixel(n, d, vp, k % vp.pixels_x, k / vp.pixels_x, max_iter, escape_radius))
        .collect())
}

/// One pixel of the parameter plane, evaluated on its own.
pub fn parameter_pixel(n: u32, d: u32, vp: &Viewport, i: usize, j: usize, max_iter: u32, escape_radius: f64) -> Escape {
    match MapParams::new(n, d, vp.pixel_to_complex(i, j)) {
        Ok(p) => critical_orbit_escape(&p, max_iter, escape_radius),
        // lambda = 0 is the degenerate map z^n
        Err(_) => Escape::Pole(0),
    }
}

pub fn render_parameter_plane(n: u32, d: u32, vp: &Viewport, max_iter: u32, escape_radius: f64) -> Result<RasterImage> {
    let grid = parameter_escape_grid(n, d, vp, max_iter, escape_radius)?;
    let mut img = RasterImage {
        width: vp.pixels_x,
        height: vp.pixels_y,
        pixels: grid.iter().map(|e| e.color()).collect(),
    };
    let w = crate::regions::build_w(n, d)?;
    for piece in w_outline(&w, 512) {
        draw_curve(&mut img, vp, &piece, W_STROKE, false);
    }
    let reach = vp.center.norm() + vp.width.hypot(vp.height);
    for j in 0..(n - 1) {
        let a = (2 * j + 1) as f64 * PI / (n - 1) as f64;
        let ray = Curve::new(
            vec![Complex64::new(0.0, 0.0), Complex64::from_polar(reach, a)],
            false,
            "sector boundary",
        );
        draw_curve(&mut img, vp, &ray, SECTOR_STROKE, false);
    }
    Ok(img)
}

/// The four sides of `dW` as open polylines.
pub fn w_outline(w: &ParamRectangle, samples: usize) -> Vec<Curve> {
    let arc = |r: f64| {
        Curve::new(
            (0..=samples)
                .map(|k| {
                    let t = w.arg_min + (w.arg_max - w.arg_min) * k as f64 / samples as f64;
                    Complex64::from_polar(r, t)
                })
                .collect(),
            false,
            "W arc",
        )
    };
    let side = |a: f64| {
        Curve::new(
            vec![Complex64::from_polar(w.r_inner, a), Complex64::from_polar(w.r_outer, a)],
            false,
            "W side",
        )
    };
    vec![arc(w.r_outer), arc(w.r_inner), side(w.arg_min), side(w.arg_max)]
}

/// Escape time of `z` under `F` for every pixel of the dynamical plane.
pub fn dynamical_escape_grid(p: &MapParams, vp: &Viewport, max_iter: u32, escape_radius: f64) -> Result<Vec<Escape>> {
    check_render_args(max_iter, escape_radius)?;
    Ok((0..vp.pixels_x * vp.pixels_y)
        .into_par_iter()
        .map(|k| orbit_escape(p, vp.pixel_to_complex(k % vp.pixels_x, k / vp.pixels_x), max_iter, escape_radius))
        .collect())
}

pub fn render_dynamical_plane(rs: &RegionSystem, vp: &Viewport, max_iter: u32) -> Result<RasterImage> {
    let grid = dynamical_escape_grid(&rs.params, vp, max_iter, DEFAULT_ESCAPE_RADIUS)?;
    let mut img = RasterImage {
        width: vp.pixels_x,
        height: vp.pixels_y,
        pixels: grid.iter().map(|e| e.color()).collect(),
    };
    draw_overlays(&mut img, vp, rs)?;
    Ok(img)
}

fn draw_overlays(img: &mut RasterImage, vp: &Viewport, rs: &RegionSystem) -> Result<()> {
    draw_curve(img, vp, &rs.gamma, GAMMA_STROKE, false);
    draw_curve(img, vp, &rs.mu, MU_STROKE, false);
    draw_curve(img, vp, &rs.gamma_hat, GAMMA_HAT_STROKE, true);
    draw_curve(img, vp, &rs.gamma_hat_n, GAMMA_HAT_N_STROKE, false);
    draw_curve(img, vp, &rs.gamma_hat_d, GAMMA_HAT_D_STROKE, false);
    let reach = vp.center.norm() + vp.width.hypot(vp.height);
    let (lo, hi) = sector_rays(&rs.params);
    for a in [lo, hi] {
        let ray = Curve::new(
            vec![Complex64::new(0.0, 0.0), Complex64::from_polar(reach, a)],
            false,
            "ray",
        );
        draw_curve(img, vp, &ray, RAY_STROKE, false);
    }
    draw_curve(img, vp, &rs.u_hat.boundary_curve(1024, "U_hat"), U_HAT_STROKE, false);
    for c in rs.u_hat_prime_contour(crate::certify::CONTOUR_RESOLUTION)?.curves {
        draw_curve(img, vp, &c, U_HAT_PRIME_STROKE, false);
    }
    Ok(())
}

/// Side-by-side view of the two constructions. Left: the older `U'`
/// (dark) inside `U` (light), with targets in `U` that have a preimage
/// count other than 2 in `U'` marked red. Right: `U-hat'` inside `U-hat`.
pub fn render_covering_panel(rs: &RegionSystem, vp: &Viewport, max_iter: u32) -> Result<RasterImage> {
    let grid = dynamical_escape_grid(&rs.params, vp, max_iter, DEFAULT_ESCAPE_RADIUS)?;
    let p = rs.params;
    let dim = |e: Escape| {
        let [r, g, b] = e.color();
        [r / 3, g / 3, b / 3]
    };
    let shade = |legacy: bool| -> Vec<[u8; 3]> {
        (0..vp.pixels_x * vp.pixels_y)
            .into_par_iter()
            .map(|k| {
                let z = vp.pixel_to_complex(k % vp.pixels_x, k / vp.pixels_x);
                if legacy {
                    if rs.in_legacy_u_prime(z) {
                        [30, 60, 160]
                    } else if rs.in_legacy_u(z) {
                        let count = p
                            .preimages(z)
                            .map(|pre| pre.iter().filter(|&&q| rs.in_legacy_u_prime(q)).count())
                            .unwrap_or(0);
                        if count == 2 {
                            [120, 160, 230]
                        } else {
                            [220, 40, 40]
                        }
                    } else {
                        dim(grid[k])
                    }
                } else if rs.in_u_hat_prime(z) {
                    [20, 120, 40]
                } else if rs.in_u_hat(z) {
                    [120, 220, 140]
                } else {
                    dim(grid[k])
                }
            })
            .collect()
    };
    let mk = |pixels| RasterImage {
        width: vp.pixels_x,
        height: vp.pixels_y,
        pixels,
    };
    let mut left = mk(shade(true));
    let mut right = mk(shade(false));
    for img in [&mut left, &mut right] {
        draw_curve(img, vp, &rs.gamma, GAMMA_STROKE, false);
        draw_curve(img, vp, &rs.mu, MU_STROKE, false);
    }
    RasterImage::side_by_side(&left, &right)
}

/// Strokes the polyline one pixel wide, stepping at a quarter pixel.
/// Dashed strokes alternate `DASH` pixels on and off along the arc length.
pub fn draw_curve(img: &mut RasterImage, vp: &Viewport, curve: &Curve, rgb: [u8; 3], dashed: bool) {
    let px = vp.pixel_size();
    let mut travelled = 0.0;
    for (a, b) in curve.segments() {
        let len = (b - a).norm() / px;
        let steps = (len * 4.0).ceil().max(1.0) as usize;
        for s in 0..=steps {
            let t = s as f64 / steps as f64;
            let on = !dashed || ((travelled + t * len) / DASH).floor() as i64 % 2 == 0;
            if on {
                if let Some((i, j)) = vp.complex_to_pixel(a + (b - a) * t) {
                    img.set(i, j, rgb);
                }
            }
        }
        travelled += len;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ImageFormat {
    Ppm,
    Png,
}

impl std::str::FromStr for ImageFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ppm" => Ok(Self::Ppm),
            "png" => Ok(Self::Png),
            other => Err(Error::InvalidArgument(format!("unknown image format {other:?}"))),
        }
    }
}

impl ImageFormat {
    /// From the file extension, defaulting to PNG.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("ppm") => Self::Ppm,
            _ => Self::Png,
        }
    }
}

/// `P6\n<w> <h>\n255\n` followed by the raw RGB bytes.
pub fn encode_ppm(img: &RasterImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend(img.rgb_bytes());
    out
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn write_image(img: &RasterImage, path: &Path, format: ImageFormat) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    match format {
        ImageFormat::Ppm => out.write_all(&encode_ppm(img)).map_err(io_err(path))?,
        ImageFormat::Png => {
            let enc_err = |e: png::EncodingError| Error::Encode {
                path: path.display().to_string(),
                message: e.to_string(),
            };
            let mut encoder = png::Encoder::new(&mut out, img.width as u32, img.height as u32);
            encoder.set_color(png::ColorType::Rgb);
            encoder.set_depth(png::BitDepth::Eight);
            let mut writer = encoder.write_header().map_err(enc_err)?;
            writer.write_image_data(&img.rgb_bytes()).map_err(enc_err)?;
            writer.finish().map_err(enc_err)?;
        }
    }
    out.flush().map_err(io_err(path))
}

/// Reads a binary PPM with maxval 255.
pub fn read_ppm(path: &Path) -> Result<RasterImage> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(io_err(path))?;
    let bad = |msg: &str| Error::Encode {
        path: path.display().to_string(),
        message: msg.into(),
    };
    // four whitespace-separated header tokens, then exactly one whitespace byte
    let mut tokens = Vec::new();
    let mut pos = 0;
    while tokens.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated PPM header"));
        }
        tokens.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    pos += 1;
    if tokens[0] != "P6" || tokens[3] != "255" {
        return Err(bad("not a P6 PPM with maxval 255"));
    }
    let width: usize = tokens[1].parse().map_err(|_| bad("bad width"))?;
    let height: usize = tokens[2].parse().map_err(|_| bad("bad height"))?;
    let data = bytes.get(pos..).unwrap_or_default();
    if data.len() != width * height * 3 {
        return Err(bad("pixel data length does not match the header"));
    }
    Ok(RasterImage {
        width,
        height,
        pixels: data.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect(),
    })
}

/// Decodes an 8-bit RGB PNG.
pub fn read_png(path: &Path) -> Result<RasterImage> {
    let file = File::open(path).map_err(io_err(path))?;
    let dec_err = |e: png::DecodingError| Error::Encode {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let mut reader = png::Decoder::new(BufReader::new(file)).read_info().map_err(dec_err)?;
    let size = reader.output_buffer_size().ok_or_else(|| Error::Encode {
        path: path.display().to_string(),
        message: "image too large".into(),
    })?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(dec_err)?;
    if info.color_type != png::ColorType::Rgb || info.bit_depth != png::BitDepth::Eight {
        return Err(Error::Encode {
            path: path.display().to_string(),
            message: "expected 8-bit RGB".into(),
        });
    }
    let (w, h) = (info.width as usize, info.height as usize);
    let mut pixels = Vec::with_capacity(w * h);
    for row in buf.chunks(info.line_size).take(h) {
        pixels.extend(row[..w * 3].chunks_exact(3).map(|c| [c[0], c[1], c[2]]));
    }
    Ok(RasterImage {
        width: w,
        height: h,
        pixels,
    })
}

/// 4-connected components of a row-major mask: per-pixel labels (0 for
/// unset pixels, components numbered from 1) and component sizes indexed
/// by label - 1.
pub fn label_components(mask: &[bool], width: usize, height: usize) -> (Vec<u32>, Vec<usize>) {
    let mut labels = vec![0u32; mask.len()];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for start in 0..mask.len() {
        if !mask[start] || labels[start] != 0 {
            continue;
        }
        let label = sizes.len() as u32 + 1;
        labels[start] = label;
        stack.push(start);
        let mut size = 0;
        while let Some(k) = stack.pop() {
            size += 1;
            let (i, j) = (k % width, k / width);
            let mut visit = |q: usize| {
                if mask[q] && labels[q] == 0 {
                    labels[q] = label;
                    stack.push(q);
                }
            };
            if i > 0 {
                visit(k - 1);
            }
            if i + 1 < width {
                visit(k + 1);
            }
            if j > 0 {
                visit(k - width);
            }
            if j + 1 < height {
                visit(k + width);
            }
        }
        sizes.push(size);
    }
    (labels, sizes)
}
