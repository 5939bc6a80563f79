//! Solutions of `B(z) = w`: closed forms, a general solver, and curves over annuli.

use std::f64::consts::PI;

use crate::complex_plane::{chordal, cis, root_of_unity, Complex, ExtComplex, Mobius, INF};
use crate::curve::{CurveSample, ParamCurve};
use crate::error::{reject, Error, Result};
use crate::poly::{aberth, deflate, AberthOptions};
use crate::product::{BlaschkeProduct, FamilySpec};

/// Distance below which roots of a fiber count as one multiple root.
pub const FIBER_CLUSTER: f64 = 1e-7;

/// The `N` roots of `B(z) = w`, repeated by multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberSolution {
    pub w: ExtComplex,
    pub roots: Vec<ExtComplex>,
    /// Sheet (branch) index of each root.
    pub sheets: Vec<usize>,
}

impl FiberSolution {
    fn indexed(w: ExtComplex, roots: Vec<ExtComplex>) -> FiberSolution {
        let sheets = (0..roots.len()).collect();
        FiberSolution { w, roots, sheets }
    }

    /// Largest `|B(z) - w| / max(1, |w|)` over finite roots; chordal when `w` is infinite.
    pub fn residual(&self, b: &BlaschkeProduct) -> f64 {
        self.roots
            .iter()
            .map(|&z| {
                let v = b.evaluate(z);
                match self.w {
                    INF => v.chordal(&INF),
                    ExtComplex::Finite(w) => match v {
                        ExtComplex::Finite(v) => (v - w).norm() / w.norm().max(1.0),
                        INF => f64::INFINITY,
                    },
                }
            })
            .fold(0.0, f64::max)
    }
}

/// `u_k = rho^{1/n} e^{i(phi + 2 k pi)/n}`.
pub fn nth_root_branch(rho: f64, phi: f64, n: u32, k: u32) -> Complex {
    cis((phi + 2.0 * PI * k as f64) / n as f64) * rho.powf(1.0 / n as f64)
}

fn polar_parts(w: ExtComplex) -> Option<(f64, f64)> {
    w.finite().map(|w| {
        let phi = w.arg();
        (w.norm(), if phi < 0.0 { phi + 2.0 * PI } else { phi })
    })
}

/// Roots of `B_a(z) = rho e^{i phi}`: `z_k = e^{i theta}(r - u_k)/(1 - r u_k)`.
pub fn fiber_single_power(a: Complex, n: u32, rho: f64, phi: f64) -> Result<FiberSolution> {
    if !(rho >= 0.0) {
        return reject("rho must be non-negative");
    }
    let (r, theta) = a.to_polar();
    let m = Mobius::new(
        Complex::new(-1.0, 0.0) * cis(theta),
        cis(theta) * r,
        Complex::new(-r, 0.0),
        Complex::new(1.0, 0.0),
    )?;
    let w = ExtComplex::from(cis(phi) * rho);
    let roots = (0..n)
        .map(|k| {
            if rho.is_infinite() {
                ExtComplex::Finite(a.conj().inv())
            } else {
                m.apply_c(nth_root_branch(rho, phi, n, k))
            }
        })
        .collect();
    Ok(FiberSolution::indexed(w, roots))
}

/// Roots of `A2 z^2 + A1 z + A0 = 0`; a vanishing leading coefficient
/// sends one root to infinity.
pub fn solve_quadratic(a2: Complex, a1: Complex, a0: Complex) -> [ExtComplex; 2] {
    let scale = a2.norm().max(a1.norm()).max(a0.norm());
    if a2.norm() < 1e-14 * scale {
        if a1.norm() == 0.0 {
            return [INF, INF];
        }
        return [ExtComplex::from(-a0 / a1), INF];
    }
    let disc = (a1 * a1 - a2 * a0 * 4.0).sqrt();
    let q1 = a1 + disc;
    let q2 = a1 - disc;
    let q = if q1.norm() >= q2.norm() { q1 } else { q2 } * -0.5;
    if q.norm() == 0.0 {
        return [ExtComplex::Finite(Complex::new(0.0, 0.0)); 2];
    }
    [ExtComplex::from(q / a2), ExtComplex::from(a0 / q)]
}

/// Quadratic for `b1(z) b2(z) = u` (prefactors included).
fn two_zero_quadratic(a1: Complex, a2: Complex, u: ExtComplex) -> [ExtComplex; 2] {
    let e = (a1.conj() / a1.norm()) * (a2.conj() / a2.norm());
    match u {
        INF => [a1.conj().inv().into(), a2.conj().inv().into()],
        ExtComplex::Finite(u) => {
            let a2c = e - u * a1.conj() * a2.conj();
            let a1c = -e * (a1 + a2) + u * (a1.conj() + a2.conj());
            let a0c = e * a1 * a2 - u;
            solve_quadratic(a2c, a1c, a0c)
        }
    }
}

/// Roots of `b1^n b2^n = rho e^{i phi}`, two per `n`-th root branch.
pub fn fiber_two_zeros(
    a1: Complex,
    a2: Complex,
    n: u32,
    rho: f64,
    phi: f64,
) -> Result<FiberSolution> {
    if !(rho >= 0.0) {
        return reject("rho must be non-negative");
    }
    let w = ExtComplex::from(cis(phi) * rho);
    let mut roots = Vec::with_capacity(2 * n as usize);
    let mut sheets = Vec::with_capacity(2 * n as usize);
    for k in 0..n {
        let u = if rho.is_infinite() {
            INF
        } else {
            ExtComplex::Finite(nth_root_branch(rho, phi, n, k))
        };
        let [z1, z2] = two_zero_quadratic(a1, a2, u);
        roots.push(z1);
        roots.push(z2);
        sheets.push(2 * k as usize);
        sheets.push(2 * k as usize + 1);
    }
    Ok(FiberSolution { w, roots, sheets })
}

/// The involution `y -> (R - y)/(1 - R y)` relating `w` and `e^{-i n alpha} z^n`.
pub fn ring_involution(big_r: f64) -> Mobius {
    Mobius::new(
        Complex::new(-1.0, 0.0),
        Complex::new(big_r, 0.0),
        Complex::new(-big_r, 0.0),
        Complex::new(1.0, 0.0),
    )
    .expect("0 < R < 1")
}

/// Principal `n`-th root on the sphere.
pub fn principal_root(y: ExtComplex, n: u32) -> ExtComplex {
    match y {
        INF => INF,
        ExtComplex::Finite(y) => {
            let (r, t) = y.to_polar();
            ExtComplex::Finite(cis(t / n as f64) * r.powf(1.0 / n as f64))
        }
    }
}

/// Roots of the rotational product over `w`, `z_k = e^{i alpha} P(y) w_k`.
pub fn fiber_rotational(r: f64, alpha: f64, n: u32, w: ExtComplex) -> Result<FiberSolution> {
    if !(r > 0.0 && r < 1.0) {
        return reject("0 < r < 1 required");
    }
    let y = ring_involution(r.powi(n as i32)).apply(w);
    let base = principal_root(y, n);
    let roots = (0..n)
        .map(|k| match base {
            INF => INF,
            ExtComplex::Finite(p) => {
                ExtComplex::Finite(p * cis(alpha) * root_of_unity(k as i64, n))
            }
        })
        .collect();
    Ok(FiberSolution::indexed(w, roots))
}

/// Roots of the two-ring product over `w` via a quadratic in `z^n`.
pub fn fiber_two_rings(
    r1: f64,
    alpha1: f64,
    r2: f64,
    alpha2: f64,
    n: u32,
    w: ExtComplex,
) -> Result<FiberSolution> {
    let c1 = cis(alpha1 * n as f64) * r1.powi(n as i32);
    let c2 = cis(alpha2 * n as f64) * r2.powi(n as i32);
    let vs = two_zero_quadratic(c1, c2, w);
    let mut roots = Vec::with_capacity(2 * n as usize);
    for v in vs {
        let p = principal_root(v, n);
        for k in 0..n {
            roots.push(match p {
                INF => INF,
                ExtComplex::Finite(p) => ExtComplex::Finite(p * root_of_unity(k as i64, n)),
            });
        }
    }
    Ok(FiberSolution::indexed(w, roots))
}

/// Roots of `P(z) - w Q(z)` polished by Newton on `B`, clustered at
/// [`FIBER_CLUSTER`] so multiple roots come out identical.
pub fn fiber_generic(b: &BlaschkeProduct, w: ExtComplex) -> Result<FiberSolution> {
    let n = b.degree() as usize;
    let wv = match w {
        INF => {
            let roots = b
                .poles()
                .iter()
                .flat_map(|p| {
                    std::iter::repeat_n(ExtComplex::Finite(p.point), p.multiplicity as usize)
                })
                .collect();
            return Ok(FiberSolution::indexed(w, roots));
        }
        ExtComplex::Finite(w) => w,
    };
    if wv == Complex::new(0.0, 0.0) {
        let roots = b
            .zeros()
            .iter()
            .flat_map(|z| std::iter::repeat_n(ExtComplex::Finite(z.point), z.multiplicity as usize))
            .collect();
        return Ok(FiberSolution::indexed(w, roots));
    }
    let (p, q) = b.as_rational();
    let poly = p.sub(&q.scale(wv));
    let d = deflate(&poly, 1e-14);
    let mut roots: Vec<ExtComplex> = aberth(&d.core, AberthOptions::default())?
        .into_iter()
        .map(ExtComplex::Finite)
        .collect();
    roots.extend(std::iter::repeat_n(
        ExtComplex::Finite(Complex::new(0.0, 0.0)),
        d.at_zero,
    ));
    roots.extend(std::iter::repeat_n(INF, d.at_infinity));
    for z in roots.iter_mut() {
        *z = polish(b, *z, w);
    }
    let roots = cluster_sphere(&roots, FIBER_CLUSTER);
    debug_assert_eq!(roots.len(), n);
    Ok(FiberSolution::indexed(w, roots))
}

fn residual_at(b: &BlaschkeProduct, z: ExtComplex, w: ExtComplex) -> f64 {
    chordal(b.evaluate(z), w)
}

/// Newton polishing kept only when it lowers the residual and stays close.
fn polish(b: &BlaschkeProduct, z: ExtComplex, w: ExtComplex) -> ExtComplex {
    let before = residual_at(b, z, w);
    if before == 0.0 {
        return z;
    }
    let res = b.newton(z, w, 3, 1e-15);
    let after = residual_at(b, res.z, w);
    if after < before && res.z.chordal(&z) < 1e-4 {
        res.z
    } else {
        z
    }
}

/// Replaces each group of points within `tol` (chordal, single linkage)
/// by copies of its centroid taken in the chart of its first member.
pub fn cluster_sphere(points: &[ExtComplex], tol: f64) -> Vec<ExtComplex> {
    let n = points.len();
    let mut group = vec![usize::MAX; n];
    let mut next = 0;
    for i in 0..n {
        if group[i] != usize::MAX {
            continue;
        }
        group[i] = next;
        let mut stack = vec![i];
        while let Some(j) = stack.pop() {
            for k in 0..n {
                if group[k] == usize::MAX && points[j].chordal(&points[k]) < tol {
                    group[k] = next;
                    stack.push(k);
                }
            }
        }
        next += 1;
    }
    let mut out = points.to_vec();
    for g in 0..next {
        let members: Vec<usize> = (0..n).filter(|&i| group[i] == g).collect();
        if members.len() < 2 {
            continue;
        }
        let inverted = points[members[0]].norm() > 1.0;
        let mut sum = Complex::new(0.0, 0.0);
        for &m in &members {
            let p = if inverted {
                points[m].recip()
            } else {
                points[m]
            };
            sum += p.finite().unwrap_or(Complex::new(0.0, 0.0));
        }
        let c = ExtComplex::from(sum / members.len() as f64);
        let c = if inverted { c.recip() } else { c };
        for &m in &members {
            out[m] = c;
        }
    }
    out
}

/// Closed-form fiber for the structured families, general solver otherwise.
pub fn fiber(b: &BlaschkeProduct, w: ExtComplex) -> Result<FiberSolution> {
    let (rho, phi) = polar_parts(w).unwrap_or((f64::INFINITY, 0.0));
    match *b.spec() {
        FamilySpec::SinglePower { a, n } => fiber_single_power(a, n, rho, phi),
        FamilySpec::TwoZeros { a1, a2, n } => fiber_two_zeros(a1, a2, n, rho, phi),
        FamilySpec::Rotational { r, alpha, n } => fiber_rotational(r, alpha, n, w),
        FamilySpec::TwoRings {
            r1,
            alpha1,
            r2,
            alpha2,
            n,
        } => fiber_two_rings(r1, alpha1, r2, alpha2, n, w),
        _ => fiber_generic(b, w),
    }
}

/// Band of moduli `rho_in <= |w| <= rho_out` and its sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusSpec {
    pub rho_in: f64,
    /// `f64::INFINITY` for an unbounded band.
    pub rho_out: f64,
    pub phi_samples: usize,
    pub rho_samples: usize,
}

impl AnnulusSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho_in >= 0.0 && self.rho_in < self.rho_out) {
            return reject("annulus needs 0 <= rho_in < rho_out");
        }
        if self.phi_samples < 3 || self.rho_samples < 1 {
            return reject("annulus needs at least 3 phi samples and 1 rho sample");
        }
        Ok(())
    }

    /// Geometric levels, linear from `rho_out/1024` when `rho_in = 0`; an
    /// unbounded band runs geometrically up to `1024 rho_in`.
    pub fn levels(&self) -> Vec<f64> {
        let m = self.rho_samples;
        let (lo, hi, geometric) = if self.rho_in == 0.0 {
            (self.rho_out / 1024.0, self.rho_out, false)
        } else if self.rho_out.is_infinite() {
            (self.rho_in, self.rho_in * 1024.0, true)
        } else {
            (self.rho_in, self.rho_out, true)
        };
        if m == 1 {
            return vec![if geometric {
                (lo * hi).sqrt()
            } else {
                0.5 * (lo + hi)
            }];
        }
        (0..m)
            .map(|i| {
                let s = i as f64 / (m - 1) as f64;
                if geometric {
                    lo * (hi / lo).powf(s)
                } else {
                    lo + (hi - lo) * s
                }
            })
            .collect()
    }
}

/// Minimal chordal gap between distinct members of a fiber.
fn fiber_gap(roots: &[ExtComplex]) -> f64 {
    let mut g = f64::INFINITY;
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            g = g.min(roots[i].chordal(&roots[j]));
        }
    }
    g
}

/// Pairs `from[i]` with `to[perm[i]]`, closest pairs first. `None` when the
/// pairing is not clearly separated.
fn match_fibers(from: &[ExtComplex], to: &[ExtComplex]) -> Option<Vec<usize>> {
    let n = from.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for (i, x) in from.iter().enumerate() {
        for (j, y) in to.iter().enumerate() {
            pairs.push((x.chordal(y), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for &(_, i, j) in &pairs {
        if perm[i] == usize::MAX && !used[j] {
            perm[i] = j;
            used[j] = true;
        }
    }
    let gap = fiber_gap(to).min(fiber_gap(from));
    for i in 0..n {
        let d = from[i].chordal(&to[perm[i]]);
        if d > 0.3 * gap {
            return None;
        }
    }
    Some(perm)
}

/// Pre-image curves of the circles `|w| = rho` for the sampled levels of
/// the band. Each curve is one cycle of sheets; sheets that collide at a
/// critical fiber are cut there and reported as open arcs.
pub fn annulus_preimage(b: &BlaschkeProduct, spec: &AnnulusSpec) -> Result<Vec<ParamCurve>> {
    spec.validate()?;
    let mut out = Vec::new();
    for rho in spec.levels() {
        out.extend(level_curves(b, rho, spec.phi_samples)?);
    }
    Ok(out)
}

/// Pre-image of the single circle `|w| = rho`.
pub fn level_curves(b: &BlaschkeProduct, rho: f64, phi_samples: usize) -> Result<Vec<ParamCurve>> {
    let family = b.spec().name().to_string();
    let n = b.degree() as usize;
    let at = |phi: f64| -> Result<Vec<ExtComplex>> {
        Ok(fiber(b, ExtComplex::from(cis(phi) * rho))?.roots)
    };
    let h0 = 2.0 * PI / phi_samples as f64;
    let mut tracks: Vec<Vec<CurveSample>> = vec![Vec::new(); n];
    let mut cuts: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut cur = at(0.0)?;
    let start = cur.clone();
    for (s, z) in cur.iter().enumerate() {
        tracks[s].push(CurveSample {
            t: 0.0,
            z: *z,
            w: b.evaluate(*z),
            detour: false,
        });
    }
    for j in 0..phi_samples {
        let (phi0, phi1) = (j as f64 * h0, (j + 1) as f64 * h0);
        // sub-steps between grid angles, halved on ambiguity
        let mut phi = phi0;
        let mut h = h0;
        let mut depth = 0;
        while phi < phi1 - 1e-15 {
            let target = (phi + h).min(phi1);
            let next = at(target)?;
            match match_fibers(&cur, &next) {
                Some(perm) => {
                    cur = (0..n).map(|i| next[perm[i]]).collect();
                    phi = target;
                    if depth > 0 {
                        depth -= 1;
                        h *= 2.0;
                    }
                }
                None if depth < 10 => {
                    depth += 1;
                    h *= 0.5;
                }
                None => {
                    let perm = greedy_perm(&cur, &next);
                    for (i, c) in cuts.iter_mut().enumerate() {
                        let close =
                            (0..n).any(|k| k != i && next[perm[i]].chordal(&next[perm[k]]) < 1e-6);
                        if close {
                            c.push(tracks[i].len());
                        }
                    }
                    cur = (0..n).map(|i| next[perm[i]]).collect();
                    phi = target;
                }
            }
        }
        for (s, z) in cur.iter().enumerate() {
            tracks[s].push(CurveSample {
                t: phi1,
                z: *z,
                w: b.evaluate(*z),
                detour: false,
            });
        }
    }
    let broken = cuts.iter().any(|c| !c.is_empty());
    let mut curves = Vec::new();
    if broken {
        for (s, track) in tracks.into_iter().enumerate() {
            let mut begin = 0;
            let mut bounds = cuts[s].clone();
            bounds.push(track.len());
            for end in bounds {
                if end > begin + 1 {
                    curves.push(ParamCurve {
                        family: family.clone(),
                        branch: s,
                        samples: track[begin..end].to_vec(),
                        start_label: format!("rho={rho}"),
                        end_label: format!("rho={rho}"),
                        closed: false,
                    });
                }
                begin = end;
            }
        }
        return Ok(curves);
    }
    // sheet s ends where sheet perm[s] started
    let end_perm = greedy_perm(&cur, &start);
    let mut seen = vec![false; n];
    for s0 in 0..n {
        if seen[s0] {
            continue;
        }
        let mut samples = Vec::new();
        let mut s = s0;
        let mut lap = 0.0;
        loop {
            seen[s] = true;
            let skip = if samples.is_empty() { 0 } else { 1 };
            samples.extend(
                tracks[s]
                    .iter()
                    .skip(skip)
                    .map(|p| CurveSample { t: p.t + lap, ..*p }),
            );
            lap += 2.0 * PI;
            s = end_perm[s];
            if s == s0 {
                break;
            }
        }
        curves.push(ParamCurve {
            family: family.clone(),
            branch: s0,
            samples,
            start_label: format!("rho={rho}"),
            end_label: format!("rho={rho}"),
            closed: true,
        });
    }
    Ok(curves)
}

fn greedy_perm(from: &[ExtComplex], to: &[ExtComplex]) -> Vec<usize> {
    let n = from.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for (i, x) in from.iter().enumerate() {
        for (j, y) in to.iter().enumerate() {
            pairs.push((x.chordal(y), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for &(_, i, j) in &pairs {
        if perm[i] == usize::MAX && !used[j] {
            perm[i] = j;
            used[j] = true;
        }
    }
    perm
}

/// Errors out when a fiber does not have the expected size.
pub fn check_fiber(b: &BlaschkeProduct, f: &FiberSolution) -> Result<()> {
    if f.roots.len() != b.degree() as usize {
        return Err(Error::Degenerate(format!(
            "fiber has {} roots, expected {}",
            f.roots.len(),
            b.degree()
        )));
    }
    Ok(())
}
