//! Boundary curves by numerical continuation of the fiber along a target path.

use crate::complex_plane::{Complex, ExtComplex, INF};
use crate::critical::{critical_points, CriticalSet};
use crate::curve::{CurveSample, ParamCurve};
use crate::error::{reject, Error, Result};
use crate::preimage::fiber_generic;
use crate::product::{BlaschkeProduct, Zero};

/// One point of a target path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSample {
    pub t: f64,
    pub w: ExtComplex,
    pub detour: bool,
}

/// A sampled path in the `w`-sphere.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TargetPath {
    pub samples: Vec<PathSample>,
}

impl TargetPath {
    pub fn from_points(points: impl IntoIterator<Item = (f64, ExtComplex)>) -> TargetPath {
        TargetPath {
            samples: points
                .into_iter()
                .map(|(t, w)| PathSample {
                    t,
                    w,
                    detour: false,
                })
                .collect(),
        }
    }

    /// Piecewise linear path through `vertices`, `samples` points spread by length.
    pub fn polyline(vertices: &[Complex], samples: usize) -> Result<TargetPath> {
        if vertices.len() < 2 || samples < vertices.len() {
            return reject("a polyline needs two vertices and a sample per vertex");
        }
        let lens: Vec<f64> = vertices.windows(2).map(|p| (p[1] - p[0]).norm()).collect();
        let total: f64 = lens.iter().sum();
        if total == 0.0 {
            return reject("polyline has zero length");
        }
        let mut pts = Vec::with_capacity(samples + vertices.len());
        let mut acc = 0.0;
        for (i, seg) in vertices.windows(2).enumerate() {
            let m = ((lens[i] / total * (samples - 1) as f64).round() as usize).max(1);
            for j in 0..m {
                let f = j as f64 / m as f64;
                pts.push((
                    (acc + f * lens[i]) / total,
                    ExtComplex::Finite(seg[0] + (seg[1] - seg[0]) * f),
                ));
            }
            acc += lens[i];
        }
        pts.push((1.0, ExtComplex::Finite(vertices[vertices.len() - 1])));
        Ok(TargetPath::from_points(pts))
    }

    /// `w = dir * t^power` for each `t` (infinite `t` gives `INF`).
    pub fn ray(dir: Complex, ts: &[f64], power: u32) -> TargetPath {
        TargetPath::from_points(ts.iter().map(|&t| {
            let w = if t.is_infinite() {
                INF
            } else {
                ExtComplex::from(dir * t.powi(power as i32))
            };
            (t, w)
        }))
    }

    /// Real segment `[lo, hi]` with samples clustered geometrically toward 0.
    pub fn real_line(lo: f64, hi: f64, samples: usize, inner: f64) -> Result<TargetPath> {
        if !(lo < 0.0 && hi > 0.0 && inner > 0.0 && inner < hi.min(-lo)) || samples < 4 {
            return reject("real line path needs lo < 0 < hi and 0 < inner < min(-lo, hi)");
        }
        let half = samples / 2;
        let geo = |end: f64, i: usize| inner * (end / inner).powf(i as f64 / (half - 1) as f64);
        let mut ws: Vec<f64> = (0..half).rev().map(|i| -geo(-lo, i)).collect();
        ws.push(0.0);
        ws.extend((0..half).map(|i| geo(hi, i)));
        Ok(TargetPath::from_points(
            ws.into_iter()
                .map(|x| (x, ExtComplex::Finite(Complex::new(x, 0.0)))),
        ))
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Replace each passage through the disk of `radius` around a center by a
    /// half-circle on the left of the direction of travel. Paths that start
    /// or end inside a disk keep those samples.
    pub fn with_detours(&self, centers: &[Complex], radius: f64, arc_samples: usize) -> TargetPath {
        let mut path = self.clone();
        for &c in centers {
            path = path.detour_one(c, radius, arc_samples.max(3));
        }
        path
    }

    fn detour_one(&self, c: Complex, radius: f64, arc_samples: usize) -> TargetPath {
        let s = &self.samples;
        let inside = |w: &ExtComplex| w.finite().is_some_and(|w| (w - c).norm() < radius);
        let mut out: Vec<PathSample> = Vec::with_capacity(s.len());
        let mut i = 0;
        while i < s.len() {
            out.push(s[i]);
            if i + 1 == s.len() || inside(&s[i].w) {
                i += 1;
                continue;
            }
            let (p, q) = match (s[i].w, s[i + 1].w) {
                (ExtComplex::Finite(p), ExtComplex::Finite(q)) => (p, q),
                _ => {
                    i += 1;
                    continue;
                }
            };
            let Some((sa, _)) = segment_disk(p, q, c, radius) else {
                i += 1;
                continue;
            };
            // find the exit: first segment j >= i whose far end leaves the disk
            let mut j = i;
            let exit = loop {
                let (pj, qj) = match (s[j].w, s.get(j + 1).map(|x| x.w)) {
                    (ExtComplex::Finite(p), Some(ExtComplex::Finite(q))) => (p, q),
                    _ => break None,
                };
                if !inside(&s[j + 1].w) {
                    match segment_disk(pj, qj, c, radius) {
                        Some((_, sb)) if sb < 1.0 => break Some((j, sb)),
                        _ => break None,
                    }
                }
                j += 1;
                if j + 1 >= s.len() {
                    break None;
                }
            };
            let Some((j, sb)) = exit else {
                i += 1;
                continue;
            };
            let pin = p + (q - p) * sa;
            let tin = s[i].t + (s[i + 1].t - s[i].t) * sa;
            let (pj, qj) = (s[j].w.finite().unwrap(), s[j + 1].w.finite().unwrap());
            let pout = pj + (qj - pj) * sb;
            let tout = s[j].t + (s[j + 1].t - s[j].t) * sb;
            let th_in = (pin - c).arg();
            let ccw = ((pout - c).arg() - th_in).rem_euclid(std::f64::consts::TAU);
            let dir = if (pout - pin).norm() > 1e-12 * radius {
                pout - pin
            } else {
                q - p
            };
            let mid = c + Complex::from_polar(radius, th_in + ccw / 2.0);
            let sweep = if (dir.conj() * (mid - pin)).im > 0.0 {
                ccw
            } else {
                ccw - std::f64::consts::TAU
            };
            for k in 0..=arc_samples {
                let f = k as f64 / arc_samples as f64;
                out.push(PathSample {
                    t: tin + (tout - tin) * f,
                    w: ExtComplex::Finite(c + Complex::from_polar(radius, th_in + sweep * f)),
                    detour: true,
                });
            }
            i = j + 1;
        }
        TargetPath { samples: out }
    }
}

/// Parameters in `[0,1]` where the segment `p -> q` enters and leaves the disk.
fn segment_disk(p: Complex, q: Complex, c: Complex, r: f64) -> Option<(f64, f64)> {
    let d = q - p;
    let f = p - c;
    let a = d.norm_sqr();
    if a == 0.0 {
        return None;
    }
    let b = 2.0 * (f.re * d.re + f.im * d.im);
    let cc = f.norm_sqr() - r * r;
    let disc = b * b - 4.0 * a * cc;
    if disc <= 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let (s0, s1) = ((-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a));
    if s1 < 0.0 || s0 > 1.0 {
        return None;
    }
    Some((s0.max(0.0), s1.min(1.0)))
}

/// Default detour radius: a hundredth of the smallest gap among the finite
/// critical values and the origin.
pub fn default_detour_radius(values: &[ExtComplex]) -> f64 {
    let mut pts: Vec<Complex> = values.iter().filter_map(|v| v.finite()).collect();
    if !pts.iter().any(|p| p.norm() < 1e-14) {
        pts.push(Complex::new(0.0, 0.0));
    }
    let mut gap = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            gap = gap.min((pts[i] - pts[j]).norm());
        }
    }
    if gap.is_finite() && gap > 0.0 {
        1e-2 * gap
    } else {
        1e-2
    }
}

/// A warning raised during continuation.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// `|B'|` fell below the threshold on a lifted point.
    NearCritical {
        sheet: usize,
        t: f64,
        derivative: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationOptions {
    pub max_newton: usize,
    pub newton_tol: f64,
    pub min_step: f64,
    pub near_critical: f64,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        ContinuationOptions {
            max_newton: 20,
            newton_tol: 1e-12,
            min_step: 1e-12,
            near_critical: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Continuation {
    pub curves: Vec<ParamCurve>,
    pub warnings: Vec<Warning>,
}

/// Lift `path` through `B`: one curve per sheet of the fiber, starting from
/// the fiber at a generic sample and continuing both ways.
pub fn boundaries_by_continuation(
    b: &BlaschkeProduct,
    path: &TargetPath,
    opts: &ContinuationOptions,
) -> Result<Continuation> {
    if path.len() < 2 {
        return reject("target path needs at least two samples");
    }
    let crit = critical_points(b)?;
    let cvals = crit.values(b);
    let lifter = Lifter {
        b,
        crit: &crit,
        cvals: &cvals,
        opts,
    };
    let anchor = lifter.anchor(path)?;
    let n = anchor.1.len();
    let mut fibers: Vec<Vec<ExtComplex>> = vec![Vec::new(); path.len()];
    fibers[anchor.0] = anchor.1.clone();
    let last = path.len() - 1;
    for i in anchor.0..last {
        let next = lifter.step(
            &fibers[i],
            &path.samples[i],
            &path.samples[i + 1],
            i + 1 == last,
        )?;
        fibers[i + 1] = next;
    }
    for i in (1..=anchor.0).rev() {
        let next = lifter.step(
            &fibers[i],
            &path.samples[i],
            &path.samples[i - 1],
            i - 1 == 0,
        )?;
        fibers[i - 1] = next;
    }
    let mut warnings = Vec::new();
    for (ps, fib) in path.samples.iter().zip(&fibers) {
        for (k, z) in fib.iter().enumerate() {
            if let Ok(ExtComplex::Finite(d)) = b.derivative(*z) {
                if d.norm() < opts.near_critical {
                    warnings.push(Warning::NearCritical {
                        sheet: k,
                        t: ps.t,
                        derivative: d.norm(),
                    });
                }
            }
        }
    }
    let family = b.spec().name().to_string();
    let curves = (0..n)
        .map(|k| {
            let samples: Vec<CurveSample> = path
                .samples
                .iter()
                .zip(&fibers)
                .map(|(ps, fib)| CurveSample {
                    t: ps.t,
                    z: fib[k],
                    w: ps.w,
                    detour: ps.detour,
                })
                .collect();
            let first = samples[0].z;
            let end = samples[samples.len() - 1].z;
            ParamCurve {
                family: family.clone(),
                branch: k,
                start_label: endpoint_label(b, &crit, first),
                end_label: endpoint_label(b, &crit, end),
                closed: first.chordal(&end) < 1e-9
                    && path.samples[0].w.chordal(&path.samples[last].w) < 1e-12,
                samples,
            }
        })
        .collect();
    Ok(Continuation { curves, warnings })
}

/// Label for a curve endpoint: a zero, a pole, `0`, `inf`, a critical point, or empty.
pub fn endpoint_label(b: &BlaschkeProduct, crit: &CriticalSet, z: ExtComplex) -> String {
    const TOL: f64 = 1e-8;
    let zeros = b.zeros();
    let name = |k: usize| {
        if zeros.len() == 1 {
            String::new()
        } else {
            (k + 1).to_string()
        }
    };
    if let Some(k) = zeros
        .iter()
        .position(|a| ExtComplex::Finite(a.point).chordal(&z) < TOL)
    {
        return format!("a{}", name(k));
    }
    if let Some(k) = b
        .poles()
        .iter()
        .position(|p| ExtComplex::Finite(p.point).chordal(&z) < TOL)
    {
        return format!("1/abar{}", name(k));
    }
    if z.is_infinite() {
        return "inf".into();
    }
    if z.norm() < TOL {
        return "0".into();
    }
    if crit.order_at(z, TOL) > 0 {
        return "crit".into();
    }
    String::new()
}

struct Lifter<'a> {
    b: &'a BlaschkeProduct,
    crit: &'a CriticalSet,
    cvals: &'a [ExtComplex],
    opts: &'a ContinuationOptions,
}

fn min_gap(f: &[ExtComplex], i: usize) -> f64 {
    f.iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, z)| f[i].chordal(z))
        .fold(f64::INFINITY, f64::min)
}

fn interp(w0: ExtComplex, w1: ExtComplex, s: f64) -> ExtComplex {
    match (w0, w1) {
        (ExtComplex::Finite(p), ExtComplex::Finite(q)) => {
            if p.norm() > 1.0 && q.norm() > 1.0 {
                let (ip, iq) = (p.inv(), q.inv());
                ExtComplex::from(ip + (iq - ip) * s).recip()
            } else {
                ExtComplex::from(p + (q - p) * s)
            }
        }
        _ if s >= 1.0 => w1,
        _ => w0,
    }
}

impl Lifter<'_> {
    fn near_critical_value(&self, w: &ExtComplex, tol: f64) -> bool {
        self.cvals.iter().any(|c| c.chordal(w) < tol)
    }

    /// Sample index with a well separated fiber, preferring `|w|` near 1.
    fn anchor(&self, path: &TargetPath) -> Result<(usize, Vec<ExtComplex>)> {
        let mut order: Vec<usize> = (0..path.len())
            .filter(|&i| !path.samples[i].detour)
            .collect();
        let key = |i: &usize| {
            let w = path.samples[*i].w;
            if w.is_infinite() || w.norm() == 0.0 {
                f64::INFINITY
            } else {
                w.norm().ln().abs()
            }
        };
        order.sort_by(|a, b| key(a).total_cmp(&key(b)));
        for i in order {
            let w = path.samples[i].w;
            if w.is_infinite() || w.norm() == 0.0 || self.near_critical_value(&w, 1e-6) {
                continue;
            }
            let fib = fiber_generic(self.b, w)?;
            if fib.roots.len() == self.b.degree() as usize
                && (0..fib.roots.len()).all(|k| min_gap(&fib.roots, k) > 1e-6)
            {
                return Ok((i, fib.roots));
            }
        }
        Err(Error::Degenerate("no sample with a separated fiber".into()))
    }

    fn step(
        &self,
        prev: &[ExtComplex],
        from: &PathSample,
        to: &PathSample,
        endpoint: bool,
    ) -> Result<Vec<ExtComplex>> {
        let w1 = to.w;
        let special = w1.is_infinite() || w1.norm() == 0.0 || self.near_critical_value(&w1, 1e-12);
        if endpoint && special {
            return Ok(self.snap(prev, to));
        }
        let mut shrink = 1.0;
        for _ in 0..4 {
            let next = (0..prev.len())
                .map(|k| self.lift_sheet(prev, k, from, to, shrink))
                .collect::<Result<Vec<_>>>()?;
            let collide = (0..next.len()).any(|k| min_gap(&next, k) < 1e-9);
            if !collide || self.near_critical_value(&w1, 1e-6) {
                return Ok(next);
            }
            shrink *= 0.25;
        }
        Err(Error::LiftStall { sheet: 0, t: to.t })
    }

    fn lift_sheet(
        &self,
        prev: &[ExtComplex],
        k: usize,
        from: &PathSample,
        to: &PathSample,
        shrink: f64,
    ) -> Result<ExtComplex> {
        let guard = shrink * min_gap(prev, k) / 3.0;
        let guard = if guard.is_finite() { guard } else { shrink };
        let mut z = prev[k];
        let mut s = 0.0;
        let mut h: f64 = 1.0;
        while s < 1.0 {
            let s1 = (s + h).min(1.0);
            let w = interp(from.w, to.w, s1);
            let r = self
                .b
                .newton(z, w, self.opts.max_newton, self.opts.newton_tol);
            let contracts =
                r.steps.len() < 2 || r.steps[1] <= 0.5 * r.steps[0] || r.steps[0] < 1e-14;
            if r.converged && contracts && z.chordal(&r.z) <= guard {
                z = r.z;
                s = s1;
                h = (2.0 * h).min(1.0);
            } else {
                h *= 0.5;
                if h < self.opts.min_step {
                    return Err(Error::LiftStall {
                        sheet: k,
                        t: from.t + (to.t - from.t) * s,
                    });
                }
            }
        }
        Ok(z)
    }

    /// Final sample at a zero, a pole or a critical value: lift up to a
    /// nearby point and attach each sheet to the closest exact preimage.
    fn snap(&self, prev: &[ExtComplex], to: &PathSample) -> Vec<ExtComplex> {
        let targets: Vec<ExtComplex> = if to.w.is_infinite() {
            self.b
                .poles()
                .iter()
                .map(|p: &Zero| ExtComplex::Finite(p.point))
                .collect()
        } else if to.w.norm() == 0.0 {
            self.b
                .zeros()
                .iter()
                .map(|p| ExtComplex::Finite(p.point))
                .collect()
        } else {
            let mut t: Vec<ExtComplex> = self
                .crit
                .all()
                .map(|c| c.point)
                .filter(|p| self.b.evaluate(*p).chordal(&to.w) < 1e-9)
                .collect();
            if let Ok(f) = fiber_generic(self.b, to.w) {
                t.extend(f.roots);
            }
            t
        };
        prev.iter()
            .map(|z| {
                *targets
                    .iter()
                    .min_by(|a, b| a.chordal(z).total_cmp(&b.chordal(z)))
                    .unwrap_or(z)
            })
            .collect()
    }
}
