//! Job runners behind the `blaschke` command.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::config::{AnimParam, CurveKind, JobConfig};
use crate::curve::ParamCurve;
use crate::domains::boundaries_for;
use crate::error::{Error, Result};
use crate::preimage::{annulus_preimage, AnnulusSpec};
use crate::product::{BlaschkeProduct, FamilySpec};
use crate::render::{render, write_atomic, Mode, RasterScene};
use crate::ExtComplex;

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::RejectParam(_) => 2,
        _ => 3,
    }
}

fn product(job: &JobConfig) -> Result<Option<BlaschkeProduct>> {
    job.family
        .as_ref()
        .map(BlaschkeProduct::build)
        .transpose()
        .map_err(|e| Error::Config(e.to_string()))
}

fn need_product(job: &JobConfig) -> Result<BlaschkeProduct> {
    product(job)?.ok_or_else(|| Error::Config("this command needs a family".into()))
}

/// `dir/stem_target.ext` beside `path`.
pub fn target_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map_or("render".into(), |s| s.to_string_lossy().into_owned());
    let name = match path.extension() {
        Some(ext) => format!("{stem}_target.{}", ext.to_string_lossy()),
        None => format!("{stem}_target"),
    };
    path.with_file_name(name)
}

fn overlay_curves(b: &BlaschkeProduct, job: &JobConfig) -> Result<Vec<Vec<ExtComplex>>> {
    Ok(boundaries_for(b, job.curves.samples)?
        .iter()
        .map(|c| c.points().collect())
        .collect())
}

fn render_one(
    b: Option<&BlaschkeProduct>,
    scene: &RasterScene,
    job: &JobConfig,
    out: &Path,
) -> Result<()> {
    let start = Instant::now();
    let img = render(b, scene, &job.scheme, job.threads)?;
    let took = start.elapsed();
    img.save(out)?;
    let mode = match scene.mode {
        Mode::Preimage => "preimage",
        Mode::Target => "target",
    };
    println!(
        "{mode:<8} {}x{} {:>9.3} s  {}",
        scene.width,
        scene.height,
        took.as_secs_f64(),
        out.display()
    );
    Ok(())
}

/// Render the configured scene. Mode `both` also writes `<stem>_target`.
pub fn run_render(job: &JobConfig) -> Result<Vec<PathBuf>> {
    let out = job
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from("render.png"));
    let b = product(job)?;
    let mut written = Vec::new();
    let mut scene = job.scene.clone();
    if scene.mode == Mode::Preimage {
        let b = b
            .as_ref()
            .ok_or_else(|| Error::Config("preimage rendering needs a family".into()))?;
        if job.overlay_curves {
            scene.overlay.curves = overlay_curves(b, job)?;
        }
    }
    render_one(b.as_ref(), &scene, job, &out)?;
    written.push(out.clone());
    if job.both {
        let mut target = job.scene.clone();
        target.mode = Mode::Target;
        let tp = target_path(&out);
        render_one(b.as_ref(), &target, job, &tp)?;
        written.push(tp);
    }
    Ok(written)
}

fn fmt_point(out: &mut String, z: ExtComplex) {
    match z {
        ExtComplex::Finite(c) => write!(out, "{},{}", c.re, c.im).unwrap(),
        ExtComplex::Infinity => out.push_str("inf,inf"),
    }
}

/// CSV with header `family,curve_id,branch,t,re,im,endpoint_label`.
/// Labels appear on the first and last rows of each curve.
pub fn curves_csv(curves: &[ParamCurve]) -> String {
    let mut out = String::from("family,curve_id,branch,t,re,im,endpoint_label\n");
    for (id, c) in curves.iter().enumerate() {
        let last = c.samples.len().saturating_sub(1);
        for (i, s) in c.samples.iter().enumerate() {
            write!(out, "{},{},{},{},", c.family, id, c.branch, s.t).unwrap();
            fmt_point(&mut out, s.z);
            let label = match i {
                0 => c.start_label.as_str(),
                i if i == last => c.end_label.as_str(),
                _ => "",
            };
            writeln!(out, ",{label}").unwrap();
        }
    }
    out
}

/// Compute boundary or annulus curves and write them as CSV.
pub fn run_curves(job: &JobConfig) -> Result<PathBuf> {
    let b = need_product(job)?;
    let start = Instant::now();
    let curves = match job.curves.kind {
        CurveKind::Boundaries => boundaries_for(&b, job.curves.samples)?,
        CurveKind::Annulus => {
            let spec = AnnulusSpec {
                rho_in: job.curves.rho_in,
                rho_out: job.curves.rho_out,
                phi_samples: job.curves.phi_samples,
                rho_samples: job.curves.rho_samples,
            };
            spec.validate().map_err(|e| Error::Config(e.to_string()))?;
            annulus_preimage(&b, &spec)?
        }
    };
    let out = job
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from("curves.csv"));
    write_atomic(&out, curves_csv(&curves).as_bytes())?;
    println!(
        "curves   {:>4} curves {:>9.3} s  {}",
        curves.len(),
        start.elapsed().as_secs_f64(),
        out.display()
    );
    Ok(out)
}

/// The family with its animated parameter replaced by `z`.
fn with_param(spec: &FamilySpec, param: AnimParam, z: crate::Complex) -> Result<FamilySpec> {
    Ok(match (spec, param) {
        (FamilySpec::SinglePower { n, .. }, AnimParam::A) => {
            FamilySpec::SinglePower { a: z, n: *n }
        }
        (FamilySpec::TwoZeros { a1, n, .. }, AnimParam::A2) => FamilySpec::TwoZeros {
            a1: *a1,
            a2: z,
            n: *n,
        },
        (FamilySpec::TwoZeros { a2, n, .. }, AnimParam::A) => FamilySpec::TwoZeros {
            a1: z,
            a2: *a2,
            n: *n,
        },
        _ => {
            return Err(Error::Config(format!(
                "family {} has no animatable parameter of that name",
                spec.name()
            )))
        }
    })
}

fn base_param(spec: &FamilySpec, param: AnimParam) -> Option<crate::Complex> {
    match (spec, param) {
        (FamilySpec::SinglePower { a, .. }, AnimParam::A) => Some(*a),
        (FamilySpec::TwoZeros { a1, .. }, AnimParam::A) => Some(*a1),
        (FamilySpec::TwoZeros { a2, .. }, AnimParam::A2) => Some(*a2),
        _ => None,
    }
}

/// Render `frame_0000.png`... into the output directory, moving one zero
/// linearly, and write `manifest.txt`.
pub fn run_animate(job: &JobConfig) -> Result<Vec<PathBuf>> {
    let spec = job
        .family
        .as_ref()
        .ok_or_else(|| Error::Config("animate needs a family".into()))?;
    let anim = job
        .animate
        .as_ref()
        .ok_or_else(|| Error::Config("animate needs animate.to".into()))?;
    let from = base_param(spec, anim.param).ok_or_else(|| {
        Error::Config(format!(
            "family {} has no animatable parameter of that name",
            spec.name()
        ))
    })?;
    let specs: Vec<FamilySpec> = (0..anim.frames)
        .map(|f| {
            let s = f as f64 / (anim.frames - 1) as f64;
            let spec = with_param(spec, anim.param, from + (anim.to - from) * s)?;
            BlaschkeProduct::build(&spec).map_err(|e| Error::Config(format!("frame {f}: {e}")))?;
            Ok(spec)
        })
        .collect::<Result<_>>()?;
    let dir = job
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from("frames"));
    fs::create_dir_all(&dir)?;
    let name = match anim.param {
        AnimParam::A => "a",
        AnimParam::A2 => "a2",
    };
    let mut manifest = String::new();
    let mut written = Vec::new();
    for (f, spec) in specs.iter().enumerate() {
        let b = BlaschkeProduct::build(spec)?;
        let mut scene = job.scene.clone();
        if job.overlay_curves && scene.mode == Mode::Preimage {
            scene.overlay.curves = overlay_curves(&b, job)?;
        }
        let file = format!("frame_{f:04}.png");
        let path = dir.join(&file);
        render_one(Some(&b), &scene, job, &path)?;
        let z = base_param(spec, anim.param).expect("animated parameter");
        writeln!(manifest, "{file} {name}={},{}", z.re, z.im).unwrap();
        written.push(path);
    }
    write_atomic(&dir.join("manifest.txt"), manifest.as_bytes())?;
    Ok(written)
}
