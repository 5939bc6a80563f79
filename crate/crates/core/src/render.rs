//! Domain coloring: annulus color scheme, raster scenes, overlays and image encoding.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex_plane::{arg_2pi, Complex, ExtComplex};
use crate::error::{reject, Error, Result};
use crate::product::BlaschkeProduct;

/// Largest pixel count a scene may request.
pub const MAX_PIXELS: u64 = 64_000_000;

pub type Rgb = [u8; 3];

/// One annulus `rho_in <= |w| < rho_out` with its hue in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub rho_in: f64,
    pub rho_out: f64,
    pub hue: f64,
}

/// Bands of hue; saturation follows the argument, brightness the modulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusScheme {
    pub bands: Vec<Band>,
    pub saturation: (f64, f64),
    pub brightness: (f64, f64),
    pub gray: Rgb,
}

impl Default for AnnulusScheme {
    /// Twelve geometric bands from 0.05 to 20 and an unbounded band beyond.
    fn default() -> Self {
        AnnulusScheme::geometric(12, 0.05, 20.0, true)
    }
}

impl AnnulusScheme {
    /// `count` bands with geometric radii between `r_min` and `r_max`, hues
    /// equally spaced from 0; `unbounded` adds a last band out to infinity.
    pub fn geometric(count: usize, r_min: f64, r_max: f64, unbounded: bool) -> AnnulusScheme {
        let total = count + unbounded as usize;
        let radius = |i: usize| r_min * (r_max / r_min).powf(i as f64 / count as f64);
        let mut bands: Vec<Band> = (0..count)
            .map(|i| Band {
                rho_in: radius(i),
                rho_out: radius(i + 1),
                hue: 360.0 * i as f64 / total as f64,
            })
            .collect();
        if unbounded {
            bands.push(Band {
                rho_in: r_max,
                rho_out: f64::INFINITY,
                hue: 360.0 * count as f64 / total as f64,
            });
        }
        AnnulusScheme {
            bands,
            saturation: (0.25, 1.0),
            brightness: (0.35, 1.0),
            gray: [128, 128, 128],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |(lo, hi): (f64, f64)| {
            (0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi) && lo <= hi
        };
        if !unit(self.saturation) || !unit(self.brightness) {
            return reject("saturation and brightness ranges must lie in [0,1]");
        }
        for (i, b) in self.bands.iter().enumerate() {
            if !(b.rho_in >= 0.0
                && b.rho_in < b.rho_out
                && b.rho_in.is_finite()
                && !b.rho_out.is_nan())
            {
                return reject(format!("band {i} has invalid radii"));
            }
            if !(0.0..360.0).contains(&b.hue) {
                return reject(format!("band {i} hue must lie in [0,360)"));
            }
            if i > 0 && self.bands[i - 1].rho_out > b.rho_in {
                return reject("bands must be sorted and non-overlapping");
            }
        }
        Ok(())
    }

    pub fn band_of(&self, r: f64) -> Option<usize> {
        let i = self.bands.partition_point(|b| b.rho_out <= r);
        (i < self.bands.len() && self.bands[i].rho_in <= r).then_some(i)
    }
}

fn channel(x: f64) -> u8 {
    (x * 255.0 + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Standard HSV to 8-bit RGB, `h` in degrees.
pub fn hsv_to_rgb(h: f64, s: f64, v: f64) -> Rgb {
    let h = h.rem_euclid(360.0) / 60.0;
    let i = h.floor();
    let f = h - i;
    let (p, q, t) = (v * (1.0 - s), v * (1.0 - s * f), v * (1.0 - s * (1.0 - f)));
    let (r, g, b) = match i as u8 {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    [channel(r), channel(g), channel(b)]
}

/// Color of a point of the `w`-sphere.
pub fn color_of(w: ExtComplex, scheme: &AnnulusScheme) -> Rgb {
    let ExtComplex::Finite(w) = w else {
        return scheme.gray;
    };
    let r = w.norm();
    let Some(i) = scheme.band_of(r) else {
        return scheme.gray;
    };
    let band = scheme.bands[i];
    let (s0, s1) = scheme.saturation;
    let (v0, v1) = scheme.brightness;
    let s = s0 + (s1 - s0) * arg_2pi(w) / std::f64::consts::TAU;
    let f = if band.rho_in == 0.0 {
        if band.rho_out.is_infinite() {
            r / (1.0 + r)
        } else {
            r / band.rho_out
        }
    } else if band.rho_out.is_infinite() {
        1.0 - band.rho_in / r
    } else {
        (r.ln() - band.rho_in.ln()) / (band.rho_out.ln() - band.rho_in.ln())
    };
    hsv_to_rgb(band.hue, s, v0 + (v1 - v0) * f.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Target,
    Preimage,
}

/// Circles `|w| = r` and `rays` equally spaced rays from the origin.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MeshSpec {
    pub circles: Vec<f64>,
    pub rays: u32,
}

impl MeshSpec {
    pub fn geometric(count: usize, r_min: f64, r_max: f64, rays: u32) -> MeshSpec {
        let circles = if count == 1 {
            vec![r_min]
        } else {
            (0..count)
                .map(|i| r_min * (r_max / r_min).powf(i as f64 / (count - 1) as f64))
                .collect()
        };
        MeshSpec { circles, rays }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Overlay {
    pub mesh: Option<MeshSpec>,
    /// Polylines in plane coordinates; non-finite points break the line.
    pub curves: Vec<Vec<ExtComplex>>,
    pub color: Rgb,
    /// Line width in pixels, at least 1.
    pub thickness: f64,
}

impl Default for Overlay {
    fn default() -> Self {
        Overlay {
            mesh: None,
            curves: Vec::new(),
            color: [0, 0, 0],
            thickness: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RasterScene {
    /// `(x0, x1, y0, y1)`.
    pub window: (f64, f64, f64, f64),
    pub width: u32,
    pub height: u32,
    pub mode: Mode,
    pub overlay: Overlay,
    pub supersample: bool,
}

impl RasterScene {
    pub fn new(window: (f64, f64, f64, f64), width: u32, height: u32, mode: Mode) -> RasterScene {
        RasterScene {
            window,
            width,
            height,
            mode,
            overlay: Overlay::default(),
            supersample: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (x0, x1, y0, y1) = self.window;
        if !(x0 < x1 && y0 < y1) || ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
            return reject("window needs x0 < x1 and y0 < y1");
        }
        if self.width == 0 || self.height == 0 {
            return reject("image size must be positive");
        }
        if self.width as u64 * self.height as u64 > MAX_PIXELS {
            return Err(Error::GuardExceeded(format!(
                "{}x{} exceeds {MAX_PIXELS} pixels",
                self.width, self.height
            )));
        }
        if !(self.overlay.thickness >= 1.0) {
            return reject("overlay thickness must be at least one pixel");
        }
        Ok(())
    }

    fn pixel_size(&self) -> (f64, f64) {
        let (x0, x1, y0, y1) = self.window;
        (
            (x1 - x0) / self.width as f64,
            (y1 - y0) / self.height as f64,
        )
    }

    /// Plane point at fractional pixel position; `row` counts up from the bottom.
    pub fn point(&self, col: f64, row: f64) -> Complex {
        let (dx, dy) = self.pixel_size();
        Complex::new(self.window.0 + col * dx, self.window.2 + row * dy)
    }

    /// Center of pixel `(col, row)`, `row` counted from the bottom.
    pub fn pixel_center(&self, col: u32, row: u32) -> Complex {
        self.point(col as f64 + 0.5, row as f64 + 0.5)
    }
}

/// An RGB raster; rows are stored bottom to top.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub width: u32,
    pub height: u32,
    pub data: Vec<u8>,
}

impl Image {
    pub fn pixel(&self, col: u32, row: u32) -> Rgb {
        let i = 3 * (row as usize * self.width as usize + col as usize);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    /// Rows top to bottom, as image files store them.
    pub fn top_down(&self) -> Vec<u8> {
        let stride = 3 * self.width as usize;
        self.data.chunks(stride).rev().flatten().copied().collect()
    }

    pub fn encode_png(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, self.width, self.height);
            enc.set_color(png::ColorType::Rgb);
            enc.set_depth(png::BitDepth::Eight);
            let mut w = enc.write_header().map_err(|e| Error::Io(e.to_string()))?;
            w.write_image_data(&self.top_down())
                .map_err(|e| Error::Io(e.to_string()))?;
        }
        Ok(out)
    }

    pub fn encode_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.top_down());
        out
    }

    /// Write PNG, or PPM when the extension is `.ppm`, through a temporary file.
    pub fn save(&self, path: &Path) -> Result<()> {
        let bytes = match path.extension().and_then(|e| e.to_str()) {
            Some("ppm") => self.encode_ppm(),
            _ => self.encode_png()?,
        };
        write_atomic(path, &bytes)
    }
}

/// Write `bytes` to a sibling temporary file and rename it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result.map_err(Error::from)
}

/// The point colored at `z`: `B(z)` in preimage mode, `z` itself otherwise.
fn pull(b: Option<&BlaschkeProduct>, z: Complex) -> ExtComplex {
    b.map_or(ExtComplex::Finite(z), |b| b.evaluate_finite(z))
}

/// Pixel-unit distance estimate from `w = f(z)` to the mesh, using `|f'|`.
fn mesh_distance(mesh: &MeshSpec, w: Complex, df: f64, px: f64) -> f64 {
    if !(df > 0.0) || !df.is_finite() {
        return f64::INFINITY;
    }
    let r = w.norm();
    let mut d = f64::INFINITY;
    for &c in &mesh.circles {
        d = d.min((r - c).abs());
    }
    if mesh.rays > 0 && r > 0.0 {
        let step = std::f64::consts::TAU / mesh.rays as f64;
        let a = arg_2pi(w);
        let off = a - (a / step).round() * step;
        if off.abs() < std::f64::consts::FRAC_PI_2 {
            d = d.min(r * off.sin().abs());
        }
    }
    d / df / px
}

fn coverage(dist: f64, thickness: f64) -> f64 {
    (thickness / 2.0 + 0.5 - dist).clamp(0.0, 1.0)
}

fn blend(base: Rgb, over: Rgb, c: f64) -> Rgb {
    let mix = |a: u8, b: u8| (a as f64 * (1.0 - c) + b as f64 * c + 0.5).floor() as u8;
    [
        mix(base[0], over[0]),
        mix(base[1], over[1]),
        mix(base[2], over[2]),
    ]
}

fn average(colors: &[Rgb]) -> Rgb {
    let n = colors.len() as u32;
    let ch = |k: usize| ((colors.iter().map(|c| c[k] as u32).sum::<u32>() * 2 + n) / (2 * n)) as u8;
    [ch(0), ch(1), ch(2)]
}

/// Distance from `p` to the segment `a -> b`.
fn segment_distance(p: Complex, a: Complex, b: Complex) -> f64 {
    let d = b - a;
    let l2 = d.norm_sqr();
    let t = if l2 > 0.0 {
        (((p - a) * d.conj()).re / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p - (a + d * t)).norm()
}

/// Render a scene; `threads` fixes the worker count (the image does not depend on it).
pub fn render(
    b: Option<&BlaschkeProduct>,
    scene: &RasterScene,
    scheme: &AnnulusScheme,
    threads: Option<usize>,
) -> Result<Image> {
    scene.validate()?;
    scheme.validate()?;
    if scene.mode == Mode::Preimage && b.is_none() {
        return reject("preimage mode needs a product");
    }
    let pullback = if scene.mode == Mode::Preimage {
        b
    } else {
        None
    };
    let (w, h) = (scene.width as usize, scene.height as usize);
    let (dx, dy) = scene.pixel_size();
    let px = dx.min(dy);
    let curve_cov = curve_coverage(scene);
    let row = |r: usize| -> Vec<u8> {
        let mut out = Vec::with_capacity(3 * w);
        for c in 0..w {
            let z = scene.pixel_center(c as u32, r as u32);
            let base = if scene.supersample {
                let offs = [(0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)];
                let cols: Vec<Rgb> = offs
                    .iter()
                    .map(|&(ox, oy)| {
                        color_of(
                            pull(pullback, scene.point(c as f64 + ox, r as f64 + oy)),
                            scheme,
                        )
                    })
                    .collect();
                average(&cols)
            } else {
                color_of(pull(pullback, z), scheme)
            };
            let mut cov: f64 = curve_cov.as_ref().map_or(0.0, |v| v[r * w + c]);
            if let Some(mesh) = &scene.overlay.mesh {
                let (wz, df) = match pullback {
                    None => (Some(z), 1.0),
                    Some(b) => match (b.evaluate_finite(z), b.derivative(ExtComplex::Finite(z))) {
                        (ExtComplex::Finite(wz), Ok(ExtComplex::Finite(d))) => (Some(wz), d.norm()),
                        _ => (None, 0.0),
                    },
                };
                if let Some(wz) = wz {
                    cov = cov.max(coverage(
                        mesh_distance(mesh, wz, df, px),
                        scene.overlay.thickness,
                    ));
                }
            }
            let rgb = if cov > 0.0 {
                blend(base, scene.overlay.color, cov)
            } else {
                base
            };
            out.extend_from_slice(&rgb);
        }
        out
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let rows: Vec<Vec<u8>> = pool.install(|| (0..h).into_par_iter().map(row).collect());
    Ok(Image {
        width: scene.width,
        height: scene.height,
        data: rows.concat(),
    })
}

/// Per-pixel coverage of the curve overlay, or `None` without curves.
fn curve_coverage(scene: &RasterScene) -> Option<Vec<f64>> {
    if scene.overlay.curves.is_empty() {
        return None;
    }
    let (w, h) = (scene.width as i64, scene.height as i64);
    let (dx, dy) = scene.pixel_size();
    let (x0, _, y0, _) = scene.window;
    let half = scene.overlay.thickness / 2.0 + 0.5;
    let to_px = |z: Complex| Complex::new((z.re - x0) / dx - 0.5, (z.im - y0) / dy - 0.5);
    let mut cov = vec![0.0f64; (w * h) as usize];
    let reach = (x0 - scene.window.1).hypot(y0 - scene.window.3);
    for curve in &scene.overlay.curves {
        for (i, seg) in curve.windows(2).enumerate() {
            // an end at infinity continues the neighbouring segment outward
            let outward = |near: Complex, prev: Option<&ExtComplex>| {
                let d = prev.and_then(|p| p.finite()).map_or(near, |p| near - p);
                (d.norm() > 0.0).then(|| near + d / d.norm() * (reach + near.norm()))
            };
            let (a, b) = match (seg[0].finite(), seg[1].finite()) {
                (Some(a), Some(b)) => (a, b),
                (Some(a), None) => match outward(a, i.checked_sub(1).map(|j| &curve[j])) {
                    Some(b) => (a, b),
                    None => continue,
                },
                (None, Some(b)) => match outward(b, curve.get(i + 2)) {
                    Some(a) => (a, b),
                    None => continue,
                },
                (None, None) => continue,
            };
            let (pa, pb) = (to_px(a), to_px(b));
            if !(pa.re.is_finite() && pa.im.is_finite() && pb.re.is_finite() && pb.im.is_finite()) {
                continue;
            }
            let lo_x = (pa.re.min(pb.re) - half).floor().max(0.0) as i64;
            let hi_x = ((pa.re.max(pb.re) + half).ceil() as i64).min(w - 1);
            let lo_y = (pa.im.min(pb.im) - half).floor().max(0.0) as i64;
            let hi_y = ((pa.im.max(pb.im) + half).ceil() as i64).min(h - 1);
            if lo_x > hi_x || lo_y > hi_y || (hi_x - lo_x) * (hi_y - lo_y) > 4 * w * h {
                continue;
            }
            for r in lo_y..=hi_y {
                for c in lo_x..=hi_x {
                    let d = segment_distance(Complex::new(c as f64, r as f64), pa, pb);
                    let k = (r * w + c) as usize;
                    cov[k] = cov[k].max(coverage(d, scene.overlay.thickness));
                }
            }
        }
    }
    Some(cov)
}
