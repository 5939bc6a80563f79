//! Boundary curves of fundamental domains in closed form.

use std::f64::consts::PI;

use crate::complex_plane::{cis, root_of_unity, Complex, ExtComplex, Mobius, INF};
use crate::continuation::{
    boundaries_by_continuation, default_detour_radius, ContinuationOptions, TargetPath,
};
use crate::critical::critical_points;
use crate::curve::{CurveSample, ParamCurve};
use crate::error::{reject, Error, Result};
use crate::preimage::solve_quadratic;
use crate::product::{BlaschkeProduct, FamilySpec};

/// Largest finite parameter on unbounded ranges.
pub const T_MAX: f64 = 1e4;
const T_MIN: f64 = 1e-4;

/// `0`, then `samples - 1` geometric values from `1e-4` to `1e4`.
pub fn unbounded_grid(samples: usize) -> Vec<f64> {
    let m = samples.max(2) - 1;
    let mut out = vec![0.0];
    if m == 1 {
        out.push(T_MAX);
        return out;
    }
    for i in 0..m {
        out.push(T_MIN * (T_MAX / T_MIN).powf(i as f64 / (m - 1) as f64));
    }
    out
}

fn sample(t: f64, z: ExtComplex, w: ExtComplex) -> CurveSample {
    CurveSample {
        t,
        z,
        w,
        detour: false,
    }
}

/// `t^n` on the sphere.
fn power(t: f64, n: u32) -> ExtComplex {
    if t.is_infinite() {
        INF
    } else {
        ExtComplex::from(Complex::new(t.powi(n as i32), 0.0))
    }
}

/// The arcs `z_k(t) = e^{i theta}(w_k t - r)/(w_k t r - 1)` from `a` to `1/conj(a)`.
pub fn boundaries_single_power(a: Complex, n: u32, samples: usize) -> Result<Vec<ParamCurve>> {
    BlaschkeProduct::build(&FamilySpec::SinglePower { a, n })?;
    if samples < 2 {
        return reject("at least two samples are required");
    }
    let (r, theta) = a.to_polar();
    let grid = unbounded_grid(samples);
    let mut curves = Vec::with_capacity(n as usize);
    for k in 0..n {
        let wk = root_of_unity(k as i64, n);
        let m = Mobius::new(
            cis(theta) * wk,
            -cis(theta) * r,
            wk * r,
            Complex::new(-1.0, 0.0),
        )?;
        let mut s: Vec<CurveSample> = grid
            .iter()
            .map(|&t| sample(t, m.apply_c(Complex::new(t, 0.0)), power(t, n)))
            .collect();
        s.push(sample(f64::INFINITY, m.apply(INF), INF));
        curves.push(ParamCurve {
            family: "single_power".into(),
            branch: k as usize,
            samples: s,
            start_label: "a".into(),
            end_label: "1/abar".into(),
            closed: false,
        });
    }
    Ok(curves)
}

/// The simple interior critical point of the two-zero product and `beta = arg B(b)`.
pub fn two_zeros_branch_point(b: &BlaschkeProduct) -> Result<(Complex, f64)> {
    let set = critical_points(b)?;
    let zs: Vec<Complex> = b.zeros().iter().map(|z| z.point).collect();
    let p = set
        .interior
        .iter()
        .filter_map(|c| c.point.finite())
        .find(|p| zs.iter().all(|z| (z - p).norm() > 1e-9))
        .ok_or_else(|| Error::Degenerate("no simple critical point".into()))?;
    let w = b.evaluate(ExtComplex::Finite(p)).finite().unwrap();
    Ok((p, w.arg()))
}

/// Quadratic coefficients of `b1(z) b2(z) = u`.
fn two_zero_coefs(a1: Complex, a2: Complex, u: Complex) -> (Complex, Complex, Complex) {
    let e = (a1.conj() / a1.norm()) * (a2.conj() / a2.norm());
    (
        e - u * a1.conj() * a2.conj(),
        -e * (a1 + a2) + u * (a1.conj() + a2.conj()),
        e * a1 * a2 - u,
    )
}

/// Curves `z_{1,2}^{(k)}(t)` over the ray `e^{i beta} t^n`, `t` in `[0, inf]`.
///
/// The square root of the discriminant is continued by nearest match; the
/// step is bisected while the match is unclear, and a crossing of a
/// double root is resolved as a detour through the upper half `t`-plane.
pub fn boundaries_two_zeros(
    a1: Complex,
    a2: Complex,
    n: u32,
    samples: usize,
) -> Result<Vec<ParamCurve>> {
    let b = BlaschkeProduct::build(&FamilySpec::TwoZeros { a1, a2, n })?;
    if samples < 2 {
        return reject("at least two samples are required");
    }
    let (_, beta) = two_zeros_branch_point(&b)?;
    let lambda = cis(beta / n as f64);
    let grid = unbounded_grid(samples);
    let dir = cis(beta);
    let mut curves = Vec::with_capacity(2 * n as usize);
    for k in 0..n {
        let u_dir = lambda * root_of_unity(k as i64, n);
        let pairs = track_two_zero_pair(a1, a2, u_dir, &grid, 2 * k as usize)?;
        let mut c1 = Vec::with_capacity(grid.len() + 1);
        let mut c2 = Vec::with_capacity(grid.len() + 1);
        for (&t, (z1, z2)) in grid.iter().zip(pairs) {
            let w = ExtComplex::from(dir * t.powi(n as i32));
            c1.push(sample(t, z1, w));
            c2.push(sample(t, z2, w));
        }
        c1.push(sample(
            f64::INFINITY,
            ExtComplex::Finite(a1.conj().inv()),
            INF,
        ));
        c2.push(sample(
            f64::INFINITY,
            ExtComplex::Finite(a2.conj().inv()),
            INF,
        ));
        for (j, (s, lab)) in [(c1, ("a1", "1/abar1")), (c2, ("a2", "1/abar2"))]
            .into_iter()
            .enumerate()
        {
            curves.push(ParamCurve {
                family: "two_zeros".into(),
                branch: 2 * k as usize + j,
                samples: s,
                start_label: lab.0.into(),
                end_label: lab.1.into(),
                closed: false,
            });
        }
    }
    Ok(curves)
}

fn roots_from((a2, a1, a0): (Complex, Complex, Complex), s: Complex) -> (ExtComplex, ExtComplex) {
    let den = a2 * 2.0;
    let scale = a2.norm().max(a1.norm());
    if den.norm() <= 1e-14 * scale {
        let [r0, r1] = solve_quadratic(a2, a1, a0);
        return (r0, r1);
    }
    (
        ExtComplex::from((-a1 + s) / den),
        ExtComplex::from((-a1 - s) / den),
    )
}

fn track_two_zero_pair(
    a1: Complex,
    a2: Complex,
    u_dir: Complex,
    grid: &[f64],
    curve: usize,
) -> Result<Vec<(ExtComplex, ExtComplex)>> {
    let coefs = |t: f64| two_zero_coefs(a1, a2, u_dir * t);
    let disc = |t: f64| {
        let (c2, c1, c0) = coefs(t);
        (c2, c1, c1 * c1 - c2 * c0 * 4.0)
    };
    let e = (a1.conj() / a1.norm()) * (a2.conj() / a2.norm());
    // at t = 0 the roots are (e(a1 + a2) +- s)/(2e), so s = e(a1 - a2) gives z1 = a1
    let mut s = e * (a1 - a2);
    let mut out = Vec::with_capacity(grid.len());
    let mut t = grid[0];
    out.push(roots_from(coefs(t), s));
    for &t_next in &grid[1..] {
        let mut h = t_next - t;
        while t < t_next {
            let cand_t = (t + h).min(t_next);
            let (_, _, d) = disc(cand_t);
            let r = d.sqrt();
            let (dp, dm) = ((r - s).norm(), (r + s).norm());
            let floor = 1e-13 * t.max(1.0);
            if dp.min(dm) <= 0.25 * dp.max(dm) || (r.norm() + s.norm()) == 0.0 {
                s = if dp <= dm { r } else { -r };
                t = cand_t;
                h = (h * 2.0).min(t_next - t).max(0.0);
                if h == 0.0 {
                    break;
                }
            } else if h > floor {
                h *= 0.5;
            } else {
                // crossing a double root: continue past it along the upper half t-plane
                let (c2, c1, _) = disc(cand_t);
                let size = c1.norm_sqr() + c2.norm_sqr();
                let jump_t = cand_t + 1e3 * floor;
                let (_, _, d2) = disc(jump_t);
                if d.norm() > 1e-6 * size && d2.norm() > 1e-6 * size {
                    return Err(Error::BranchJump { curve, t: cand_t });
                }
                let r2 = d2.sqrt();
                let target = s * Complex::new(0.0, -1.0);
                s = if (r2 - target).norm() <= (r2 + target).norm() {
                    r2
                } else {
                    -r2
                };
                t = jump_t.min(t_next);
                h = (t_next - t).max(floor);
            }
        }
        t = t_next;
        out.push(roots_from(coefs(t), s));
    }
    Ok(out)
}

/// Ray at `angle` sampled in `u = |z|^n`, so the samples spread evenly over the target.
fn ray_curve(
    family: &str,
    branch: usize,
    angle: f64,
    n: u32,
    grid: &[f64],
    w_of: impl Fn(f64) -> ExtComplex,
) -> ParamCurve {
    let dir = cis(angle);
    let mut s: Vec<CurveSample> = grid
        .iter()
        .map(|&u| sample(u, ExtComplex::Finite(dir * u.powf(1.0 / n as f64)), w_of(u)))
        .collect();
    s.push(sample(f64::INFINITY, INF, w_of(f64::INFINITY)));
    ParamCurve {
        family: family.into(),
        branch,
        samples: s,
        start_label: "0".into(),
        end_label: "inf".into(),
        closed: false,
    }
}

/// Rays `e^{i(alpha + (2k+1) pi/n)} u^{1/n}` bounding the domains of the rotational family.
pub fn boundaries_rotational(
    r: f64,
    alpha: f64,
    n: u32,
    samples: usize,
) -> Result<Vec<ParamCurve>> {
    BlaschkeProduct::build(&FamilySpec::Rotational { r, alpha, n })?;
    let big_r = r.powi(n as i32);
    let grid = unbounded_grid(samples);
    let w_of = |u: f64| {
        if u.is_infinite() {
            return ExtComplex::Finite(Complex::new(1.0 / big_r, 0.0));
        }
        ExtComplex::from(Complex::new((u + big_r) / (big_r * u + 1.0), 0.0))
    };
    Ok((0..n)
        .map(|k| {
            ray_curve(
                "rotational",
                k as usize,
                alpha + (2 * k + 1) as f64 * PI / n as f64,
                n,
                &grid,
                w_of,
            )
        })
        .collect())
}

/// `B` restricted to `e^{-i n alpha} z^n = v` for aligned rings.
pub fn aligned_ring_value(r1: f64, r2: f64, n: u32, v: ExtComplex) -> ExtComplex {
    let (q, s) = (
        r1.powi(n as i32) + r2.powi(n as i32),
        (r1 * r2).powi(n as i32),
    );
    match v {
        INF => ExtComplex::Finite(Complex::new(1.0 / s, 0.0)),
        ExtComplex::Finite(v) => {
            let den = v * v * s - v * q + 1.0;
            if den.norm() == 0.0 {
                INF
            } else {
                ExtComplex::from((v * v - v * q + s) / den)
            }
        }
    }
}

/// The `2n` rays `e^{i(alpha + k pi/n)} u^{1/n}` of the aligned two-ring family.
pub fn boundaries_two_rings_aligned(
    r1: f64,
    r2: f64,
    alpha: f64,
    n: u32,
    samples: usize,
) -> Result<Vec<ParamCurve>> {
    BlaschkeProduct::build(&FamilySpec::TwoRings {
        r1,
        alpha1: alpha,
        r2,
        alpha2: alpha,
        n,
    })?;
    let grid = unbounded_grid(samples);
    Ok((0..2 * n)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let w_of = move |u: f64| {
                let v = if u.is_infinite() {
                    INF
                } else {
                    ExtComplex::Finite(Complex::new(sign * u, 0.0))
                };
                aligned_ring_value(r1, r2, n, v)
            };
            ray_curve(
                "two_rings",
                k as usize,
                alpha + k as f64 * PI / n as f64,
                n,
                &grid,
                w_of,
            )
        })
        .collect())
}

/// Roots `K_{1,2}(t)` of `(1 - ts) v^2 - q(1 - t) v + (s - t) = 0`, the values
/// of `e^{-i n alpha} z^n` over the real point `t`.
pub fn ring_level_roots(r1: f64, r2: f64, n: u32, t: f64) -> (ExtComplex, ExtComplex) {
    let (q, s) = (
        r1.powi(n as i32) + r2.powi(n as i32),
        (r1 * r2).powi(n as i32),
    );
    let a2 = 1.0 - t * s;
    let a1 = -q * (1.0 - t);
    let a0 = s - t;
    let d = Complex::new(a1 * a1 - 4.0 * a2 * a0, 0.0).sqrt();
    if a2.abs() < 1e-14 {
        let [x, y] = solve_quadratic(
            Complex::new(a2, 0.0),
            Complex::new(a1, 0.0),
            Complex::new(a0, 0.0),
        );
        return (x, y);
    }
    let k1 = (Complex::new(-a1, 0.0) + d) / (2.0 * a2);
    let k2 = (Complex::new(-a1, 0.0) - d) / (2.0 * a2);
    (ExtComplex::Finite(k1), ExtComplex::Finite(k2))
}

/// The `2n` solutions of `B(z) = t` for aligned rings, `e^{i alpha} K^{1/n} w_k`.
pub fn aligned_ring_fiber(r1: f64, r2: f64, alpha: f64, n: u32, t: f64) -> Vec<ExtComplex> {
    let (k1, k2) = ring_level_roots(r1, r2, n, t);
    let mut out = Vec::with_capacity(2 * n as usize);
    for kv in [k1, k2] {
        for k in 0..n {
            out.push(match kv {
                INF => INF,
                ExtComplex::Finite(v) => {
                    let (m, a) = v.to_polar();
                    ExtComplex::Finite(
                        cis(alpha + a / n as f64)
                            * root_of_unity(k as i64, n)
                            * m.powf(1.0 / n as f64),
                    )
                }
            });
        }
    }
    out
}

/// Boundary curves for any product: closed forms where available, otherwise
/// continuation over a ray `arg w = beta` from `0` to `inf`.
pub fn boundaries_for(b: &BlaschkeProduct, samples: usize) -> Result<Vec<ParamCurve>> {
    match b.spec() {
        FamilySpec::SinglePower { a, n } => boundaries_single_power(*a, *n, samples),
        FamilySpec::TwoZeros { a1, a2, n } => boundaries_two_zeros(*a1, *a2, *n, samples),
        FamilySpec::Rotational { r, alpha, n } => boundaries_rotational(*r, *alpha, *n, samples),
        FamilySpec::TwoRings {
            r1,
            alpha1,
            r2,
            alpha2,
            n,
        } if alpha1 == alpha2 => boundaries_two_rings_aligned(*r1, *r2, *alpha1, *n, samples),
        FamilySpec::PartialInfinite { .. } => {
            let path = crate::infinite::real_axis_path(b, samples, None)?;
            Ok(boundaries_by_continuation(b, &path, &ContinuationOptions::default())?.curves)
        }
        _ => Ok(boundaries_by_continuation(
            b,
            &ray_path(b, samples)?,
            &ContinuationOptions::default(),
        )?
        .curves),
    }
}

/// Ray from `0` to `inf` through the first nonzero interior critical value
/// (the positive real axis when there is none), detoured around critical values.
pub fn ray_path(b: &BlaschkeProduct, samples: usize) -> Result<TargetPath> {
    let crit = critical_points(b)?;
    let values = crit.values(b);
    let beta = crit
        .interior
        .iter()
        .filter_map(|c| b.evaluate(c.point).finite())
        .find(|w| w.norm() > 1e-9)
        .map_or(0.0, |w| w.arg());
    let mut ts = unbounded_grid(samples);
    ts.push(f64::INFINITY);
    let centers: Vec<Complex> = values.iter().filter_map(|v| v.finite()).collect();
    Ok(TargetPath::ray(cis(beta), &ts, 1).with_detours(
        &centers,
        default_detour_radius(&values),
        24,
    ))
}
