//! Job configuration: flat JSON with dotted keys.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::complex_plane::Complex;
use crate::error::{Error, Result};
use crate::product::{FamilySpec, Zero, ZeroSequence};
use crate::render::{AnnulusScheme, MeshSpec, Mode, RasterScene};

/// Documented keys, shown by `--help`.
pub const KEYS_HELP: &str = "\
Config keys (flat JSON object, dotted names; complex numbers as [re, im]):
  family                single_power | two_zeros | rotational | two_rings | partial_infinite | custom
  family.a, family.n    single_power zero and order
  family.a1, family.a2  two_zeros zeros (order family.n)
  family.r, family.alpha                          rotational ring
  family.r1, family.alpha1, family.r2, family.alpha2  two_rings
  family.m, family.symmetry                       partial_infinite (inverse-square rule)
  family.zeros          custom: list of [re, im]
  scene.window          [x0, x1, y0, y1]
  scene.width, scene.height
  scene.mode            preimage | target | both
  scene.supersample     2x2 supersampling
  scheme.bands, scheme.r_min, scheme.r_max, scheme.unbounded
  scheme.saturation, scheme.brightness            [lo, hi] in [0,1]
  overlay.mesh_circles, overlay.mesh_rays, overlay.curves (bool),
  overlay.color ([r,g,b]), overlay.thickness
  output                output path (file, or directory for animate)
  curves.kind           boundaries | annulus
  curves.samples, curves.rho_in, curves.rho_out, curves.rho_samples, curves.phi_samples
  animate.param         a | a2
  animate.to, animate.frames
  seed                  hex seed for randomized checks
  threads               worker threads, 0 = auto";

macro_rules! raw_config {
    ($( $key:literal => $field:ident : $ty:ty ),* $(,)?) => {
        /// Config as written: every key optional, unknown keys rejected.
        #[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct RawConfig {
            $(
                #[serde(rename = $key, default, skip_serializing_if = "Option::is_none")]
                pub $field: Option<$ty>,
            )*
        }

        impl RawConfig {
            /// Set one dotted key from a JSON value.
            pub fn set(&mut self, key: &str, value: Value) -> Result<()> {
                match key {
                    $( $key => {
                        self.$field = Some(serde_json::from_value(value)
                            .map_err(|e| Error::Config(format!("{key}: {e}")))?);
                    } )*
                    _ => return Err(Error::Config(format!("unknown key {key}"))),
                }
                Ok(())
            }
        }
    };
}

raw_config! {
    "family" => family: String,
    "family.a" => a: [f64; 2],
    "family.n" => n: u32,
    "family.a1" => a1: [f64; 2],
    "family.a2" => a2: [f64; 2],
    "family.r" => r: f64,
    "family.alpha" => alpha: f64,
    "family.r1" => r1: f64,
    "family.alpha1" => alpha1: f64,
    "family.r2" => r2: f64,
    "family.alpha2" => alpha2: f64,
    "family.m" => m: usize,
    "family.symmetry" => symmetry: u32,
    "family.zeros" => zeros: Vec<[f64; 2]>,
    "scene.window" => window: [f64; 4],
    "scene.width" => width: u32,
    "scene.height" => height: u32,
    "scene.mode" => mode: String,
    "scene.supersample" => supersample: bool,
    "scheme.bands" => bands: usize,
    "scheme.r_min" => r_min: f64,
    "scheme.r_max" => r_max: f64,
    "scheme.unbounded" => unbounded: bool,
    "scheme.saturation" => saturation: [f64; 2],
    "scheme.brightness" => brightness: [f64; 2],
    "overlay.mesh_circles" => mesh_circles: usize,
    "overlay.mesh_rays" => mesh_rays: u32,
    "overlay.curves" => overlay_curves: bool,
    "overlay.color" => overlay_color: [u8; 3],
    "overlay.thickness" => thickness: f64,
    "output" => output: String,
    "curves.kind" => curves_kind: String,
    "curves.samples" => curve_samples: usize,
    "curves.rho_in" => rho_in: f64,
    "curves.rho_out" => rho_out: f64,
    "curves.rho_samples" => rho_samples: usize,
    "curves.phi_samples" => phi_samples: usize,
    "animate.param" => animate_param: String,
    "animate.to" => animate_to: [f64; 2],
    "animate.frames" => frames: usize,
    "seed" => seed: String,
    "threads" => threads: usize,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<RawConfig> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Parse `key=value`; the value is JSON, or a comma list of numbers, or a bare string.
    pub fn set_from_str(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected key=value, got {assignment}")))?;
        self.set(key.trim(), parse_value(value.trim()))
    }
}

fn parse_value(text: &str) -> Value {
    if let Ok(v) = serde_json::from_str::<Value>(text) {
        return v;
    }
    let nums: Option<Vec<Value>> = text
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .ok()
                .and_then(|x| serde_json::Number::from_f64(x).map(Value::Number))
        })
        .collect();
    match nums {
        Some(v) if v.len() > 1 => Value::Array(v),
        _ => Value::String(text.to_string()),
    }
}

/// Parse a seed written in hex, with or without `0x`.
pub fn parse_seed(text: &str) -> Result<u64> {
    let t = text
        .trim()
        .trim_start_matches("0x")
        .trim_start_matches("0X");
    u64::from_str_radix(t, 16).map_err(|_| Error::Config(format!("bad hex seed {text}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Boundaries,
    Annulus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveOptions {
    pub kind: CurveKind,
    pub samples: usize,
    pub rho_in: f64,
    pub rho_out: f64,
    pub rho_samples: usize,
    pub phi_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnimParam {
    A,
    A2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnimateOptions {
    pub param: AnimParam,
    pub to: Complex,
    pub frames: usize,
}

/// Validated job configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct JobConfig {
    pub family: Option<FamilySpec>,
    pub scene: RasterScene,
    pub both: bool,
    pub scheme: AnnulusScheme,
    pub overlay_curves: bool,
    pub output: Option<PathBuf>,
    pub curves: CurveOptions,
    pub animate: Option<AnimateOptions>,
    pub seed: u64,
    pub threads: Option<usize>,
}

pub const DEFAULT_SEED: u64 = 0x5eed;

fn c(v: [f64; 2]) -> Complex {
    Complex::new(v[0], v[1])
}

fn need<T: Clone>(v: &Option<T>, key: &str) -> Result<T> {
    v.clone()
        .ok_or_else(|| Error::Config(format!("missing key {key}")))
}

impl JobConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<JobConfig> {
        let family = match raw.family.as_deref() {
            None => None,
            Some(kind) => Some(family_from_raw(kind, raw)?),
        };
        if let Some(f) = &family {
            crate::product::BlaschkeProduct::build(f).map_err(|e| Error::Config(e.to_string()))?;
        }
        let window = raw.window.unwrap_or([-3.0, 3.0, -3.0, 3.0]);
        let (mode, both) = match raw.mode.as_deref().unwrap_or("preimage") {
            "preimage" => (Mode::Preimage, false),
            "target" => (Mode::Target, false),
            "both" => (Mode::Preimage, true),
            other => return Err(Error::Config(format!("scene.mode: unknown mode {other}"))),
        };
        let mut scene = RasterScene::new(
            (window[0], window[1], window[2], window[3]),
            raw.width.unwrap_or(800),
            raw.height.unwrap_or(800),
            mode,
        );
        scene.supersample = raw.supersample.unwrap_or(false);
        if raw.mesh_circles.is_some() || raw.mesh_rays.is_some() {
            scene.overlay.mesh = Some(MeshSpec::geometric(
                raw.mesh_circles.unwrap_or(0),
                raw.r_min.unwrap_or(0.05),
                raw.r_max.unwrap_or(20.0),
                raw.mesh_rays.unwrap_or(0),
            ));
        }
        if let Some(col) = raw.overlay_color {
            scene.overlay.color = col;
        }
        if let Some(t) = raw.thickness {
            scene.overlay.thickness = t;
        }
        let bands = raw.bands.unwrap_or(12);
        let (r_min, r_max) = (raw.r_min.unwrap_or(0.05), raw.r_max.unwrap_or(20.0));
        if bands == 0 || !(r_min > 0.0 && r_min < r_max && r_max.is_finite()) {
            return Err(Error::Config(
                "scheme needs bands >= 1 and 0 < r_min < r_max".into(),
            ));
        }
        let mut scheme =
            AnnulusScheme::geometric(bands, r_min, r_max, raw.unbounded.unwrap_or(true));
        if let Some(s) = raw.saturation {
            scheme.saturation = (s[0], s[1]);
        }
        if let Some(v) = raw.brightness {
            scheme.brightness = (v[0], v[1]);
        }
        scheme
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        let mut probe = scene.clone();
        probe.mode = Mode::Target;
        probe.validate().map_err(|e| match e {
            Error::GuardExceeded(m) => Error::GuardExceeded(m),
            e => Error::Config(e.to_string()),
        })?;
        let kind = match raw.curves_kind.as_deref().unwrap_or("boundaries") {
            "boundaries" => CurveKind::Boundaries,
            "annulus" => CurveKind::Annulus,
            other => return Err(Error::Config(format!("curves.kind: unknown kind {other}"))),
        };
        let curves = CurveOptions {
            kind,
            samples: raw.curve_samples.unwrap_or(400),
            rho_in: raw.rho_in.unwrap_or(0.1),
            rho_out: raw.rho_out.unwrap_or(10.0),
            rho_samples: raw.rho_samples.unwrap_or(5),
            phi_samples: raw.phi_samples.unwrap_or(720),
        };
        if curves.samples < 2 {
            return Err(Error::Config("curves.samples must be at least 2".into()));
        }
        let animate = match (&raw.animate_param, &raw.animate_to) {
            (None, None) => None,
            (param, to) => {
                let param = match param.as_deref().unwrap_or("a") {
                    "a" => AnimParam::A,
                    "a2" => AnimParam::A2,
                    other => {
                        return Err(Error::Config(format!(
                            "animate.param: unknown parameter {other}"
                        )))
                    }
                };
                let to = c(need(to, "animate.to")?);
                let frames = raw.frames.unwrap_or(30);
                if frames < 2 {
                    return Err(Error::Config("animate.frames must be at least 2".into()));
                }
                if !(to.norm() < 1.0) || to.norm() == 0.0 {
                    return Err(Error::Config(
                        "animate.to must lie in the open disk minus 0".into(),
                    ));
                }
                Some(AnimateOptions { param, to, frames })
            }
        };
        let seed = match &raw.seed {
            Some(s) => parse_seed(s)?,
            None => DEFAULT_SEED,
        };
        let threads = match raw.threads {
            None | Some(0) => None,
            Some(t) => Some(t),
        };
        Ok(JobConfig {
            family,
            scene,
            both,
            scheme,
            overlay_curves: raw.overlay_curves.unwrap_or(false),
            output: raw.output.as_ref().map(PathBuf::from),
            curves,
            animate,
            seed,
            threads,
        })
    }
}

fn family_from_raw(kind: &str, raw: &RawConfig) -> Result<FamilySpec> {
    Ok(match kind {
        "single_power" => FamilySpec::SinglePower {
            a: c(need(&raw.a, "family.a")?),
            n: need(&raw.n, "family.n")?,
        },
        "two_zeros" => FamilySpec::TwoZeros {
            a1: c(need(&raw.a1, "family.a1")?),
            a2: c(need(&raw.a2, "family.a2")?),
            n: need(&raw.n, "family.n")?,
        },
        "rotational" => FamilySpec::Rotational {
            r: need(&raw.r, "family.r")?,
            alpha: raw.alpha.unwrap_or(0.0),
            n: need(&raw.n, "family.n")?,
        },
        "two_rings" => FamilySpec::TwoRings {
            r1: need(&raw.r1, "family.r1")?,
            alpha1: raw.alpha1.or(raw.alpha).unwrap_or(0.0),
            r2: need(&raw.r2, "family.r2")?,
            alpha2: raw.alpha2.or(raw.alpha).unwrap_or(0.0),
            n: need(&raw.n, "family.n")?,
        },
        "partial_infinite" => FamilySpec::PartialInfinite {
            rule: ZeroSequence::InverseSquare {
                symmetry: raw.symmetry.unwrap_or(3),
            },
            m: need(&raw.m, "family.m")?,
        },
        "custom" => FamilySpec::Custom {
            zeros: need(&raw.zeros, "family.zeros")?
                .into_iter()
                .map(|z| Zero {
                    point: c(z),
                    multiplicity: 1,
                })
                .collect(),
        },
        other => return Err(Error::Config(format!("family: unknown family {other}"))),
    })
}
