//! Partial products of the infinite product with zeros `(1 - 1/(n+1)^2) w_k`, `w_k^3 = 1`.

use crate::complex_plane::{cis, root_of_unity, Complex, ExtComplex, INF};
use crate::continuation::{
    boundaries_by_continuation, Continuation, ContinuationOptions, TargetPath,
};
use crate::critical::critical_points;
use crate::error::Result;
use crate::product::{BlaschkeProduct, FamilySpec, ZeroSequence};

pub const CUBE_SYMMETRY: u32 = 3;

/// `B_m` for the three-fold inverse-square sequence.
pub fn partial_product(m: usize) -> Result<BlaschkeProduct> {
    BlaschkeProduct::build(&FamilySpec::PartialInfinite {
        rule: ZeroSequence::InverseSquare {
            symmetry: CUBE_SYMMETRY,
        },
        m,
    })
}

/// Elementary symmetric functions `(s1, s2, p)` of `c_n = a_n^3` for the first three shells.
pub fn shell_symmetric_functions() -> (f64, f64, f64) {
    let rule = ZeroSequence::InverseSquare {
        symmetry: CUBE_SYMMETRY,
    };
    let c: Vec<f64> = (1..=3).map(|n| rule.shell_modulus(n).powi(3)).collect();
    (
        c[0] + c[1] + c[2],
        c[0] * c[1] + c[0] * c[2] + c[1] * c[2],
        c[0] * c[1] * c[2],
    )
}

/// `theta` with `u + 1/u = 2 cos theta` for the quadratic factor of `B_9(z) = 1`.
pub fn fiber_angle() -> f64 {
    let (s1, s2, p) = shell_symmetric_functions();
    (0.5 * (1.0 - p + s1 - s2) / (1.0 - p)).acos()
}

/// The nine solutions of `B_9(z) = 1`: `e^{i pi/3} w_k` and `e^{+-i theta/3} w_k`.
pub fn fiber_over_one() -> Vec<Complex> {
    let th = fiber_angle();
    let mut out = Vec::with_capacity(9);
    for base in [
        cis(std::f64::consts::PI / 3.0),
        cis(th / 3.0),
        cis(-th / 3.0),
    ] {
        for k in 0..3 {
            out.push(base * root_of_unity(k, 3));
        }
    }
    out
}

/// Critical points of `B_9` other than `0` and `inf`, from the quadratic in `X = u + 1/u`:
/// `(s2 - p s1) X^2 + 2(p s2 - s1) X + (s1 + p)^2 + 4(1 - p^2) - (1 + s2)^2 = 0`, `u = z^3`.
pub fn reduced_critical_points() -> Vec<Complex> {
    let (s1, s2, p) = shell_symmetric_functions();
    let qa = s2 - p * s1;
    let qb = 2.0 * (p * s2 - s1);
    let qc = (s1 + p).powi(2) + 4.0 * (1.0 - p * p) - (1.0 + s2).powi(2);
    let d = Complex::new(qb * qb - 4.0 * qa * qc, 0.0).sqrt();
    let mut out = Vec::with_capacity(12);
    for x in [(-qb + d) / (2.0 * qa), (-qb - d) / (2.0 * qa)] {
        let e = (x * x - 4.0).sqrt();
        for u in [(x + e) / 2.0, (x - e) / 2.0] {
            let (r, a) = u.to_polar();
            for k in 0..3 {
                out.push(Complex::from_polar(r.cbrt(), a / 3.0) * root_of_unity(k, 3));
            }
        }
    }
    out
}

/// Real axis of the `w`-plane, from `-inf` to `inf`, half-circle detours around
/// `0` and the finite critical values. `radius` defaults to a hundredth of the
/// smallest modulus of a nonzero critical value.
pub fn real_axis_path(
    b: &BlaschkeProduct,
    samples: usize,
    radius: Option<f64>,
) -> Result<TargetPath> {
    let crit = critical_points(b)?;
    let values = crit.values(b);
    let mut centers: Vec<Complex> = vec![Complex::new(0.0, 0.0)];
    centers.extend(
        values
            .iter()
            .filter_map(|v| v.finite())
            .filter(|c| c.norm() > 1e-14),
    );
    let min_mod = centers
        .iter()
        .skip(1)
        .map(|c| c.norm())
        .fold(f64::INFINITY, f64::min);
    let radius = radius.unwrap_or(if min_mod.is_finite() {
        1e-2 * min_mod
    } else {
        1e-2
    });
    let span = centers.iter().map(|c| c.norm()).fold(1.0, f64::max) * 1e3;
    let line = TargetPath::real_line(-span, span, samples, radius * 1e-2)?;
    let mut points = vec![(f64::NEG_INFINITY, INF)];
    points.extend(line.samples.iter().map(|s| (s.t, s.w)));
    points.push((f64::INFINITY, INF));
    Ok(TargetPath::from_points(points).with_detours(&centers, radius, 24))
}

/// Boundary curves of `B_m` by continuation over the detoured real axis.
pub fn partial_boundaries(m: usize, samples: usize) -> Result<(BlaschkeProduct, Continuation)> {
    let b = partial_product(m)?;
    let path = real_axis_path(&b, samples, None)?;
    let cont = boundaries_by_continuation(&b, &path, &ContinuationOptions::default())?;
    Ok((b, cont))
}

/// `|z| <= 2` and at least `0.05` from each cube root of unity.
pub fn in_compact(z: Complex) -> bool {
    z.norm() <= 2.0 && (0..3).all(|k| (z - root_of_unity(k, 3)).norm() >= 0.05)
}

/// Largest `|B_a - B_b|` over a polar grid of the disk `|z| <= radius`.
pub fn sup_difference(
    a: &BlaschkeProduct,
    b: &BlaschkeProduct,
    radius: f64,
    rings: usize,
    spokes: usize,
) -> f64 {
    let mut sup: f64 = 0.0;
    for i in 0..=rings {
        let r = radius * i as f64 / rings as f64;
        for j in 0..spokes {
            let z = Complex::from_polar(r, std::f64::consts::TAU * j as f64 / spokes as f64);
            let d = a.evaluate_finite(z).abs_diff(&b.evaluate_finite(z));
            sup = sup.max(d);
        }
    }
    sup
}

/// Distance from `p` to a polyline (finite vertices only).
pub fn polyline_distance(p: Complex, line: &[ExtComplex]) -> f64 {
    let mut best = f64::INFINITY;
    for seg in line.windows(2) {
        let (Some(a), Some(b)) = (seg[0].finite(), seg[1].finite()) else {
            continue;
        };
        let d = b - a;
        let l2 = d.norm_sqr();
        let t = if l2 > 0.0 {
            (((p - a) * d.conj()).re / l2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        best = best.min((p - (a + d * t)).norm());
    }
    best
}

/// Segments of a curve set bucketed on a square grid of side `cell` over `|x|, |y| <= 2 + cell`.
struct SegmentGrid {
    cell: f64,
    side: usize,
    buckets: Vec<Vec<(Complex, Complex)>>,
}

impl SegmentGrid {
    const HALF: f64 = 2.0;

    fn new(curves: &[Vec<ExtComplex>], cell: f64) -> SegmentGrid {
        let half = Self::HALF + cell;
        let side = (2.0 * half / cell).ceil() as usize;
        let mut buckets = vec![Vec::new(); side * side];
        let idx = |x: f64| (((x + half) / cell).floor().max(0.0) as usize).min(side - 1);
        for c in curves {
            for seg in c.windows(2) {
                let (Some(a), Some(b)) = (seg[0].finite(), seg[1].finite()) else {
                    continue;
                };
                let (x0, x1) = (a.re.min(b.re) - cell, a.re.max(b.re) + cell);
                let (y0, y1) = (a.im.min(b.im) - cell, a.im.max(b.im) + cell);
                if x1 < -half || x0 > half || y1 < -half || y0 > half {
                    continue;
                }
                for i in idx(x0)..=idx(x1) {
                    for j in idx(y0)..=idx(y1) {
                        buckets[i * side + j].push((a, b));
                    }
                }
            }
        }
        SegmentGrid {
            cell,
            side,
            buckets,
        }
    }

    /// Whether some segment lies within `cell` of `p` (`p` inside the grid).
    fn near(&self, p: Complex) -> bool {
        let half = Self::HALF + self.cell;
        let idx = |x: f64| (((x + half) / self.cell).floor().max(0.0) as usize).min(self.side - 1);
        self.buckets[idx(p.re) * self.side + idx(p.im)]
            .iter()
            .any(|&(a, b)| {
                polyline_distance(p, &[ExtComplex::Finite(a), ExtComplex::Finite(b)]) <= self.cell
            })
    }
}

/// Points of `from` inside the compact set farther than `delta` from every curve of `to`.
pub fn unmatched_points(
    from: &[Vec<ExtComplex>],
    to: &[Vec<ExtComplex>],
    delta: f64,
) -> Vec<Complex> {
    let grid = SegmentGrid::new(to, delta);
    from.iter()
        .flatten()
        .filter_map(|z| z.finite())
        .filter(|&z| in_compact(z))
        .filter(|&z| !grid.near(z))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::critical_points;

    #[test]
    fn closed_form_fiber_over_one() {
        let b = partial_product(9).unwrap();
        for z in fiber_over_one() {
            assert!((z.norm() - 1.0).abs() < 1e-14);
            let w = b.evaluate_finite(z).finite().unwrap();
            assert!((w - 1.0).norm() < 1e-9);
        }
        assert!((fiber_angle().to_degrees() - 11.5).abs() < 0.5);
    }

    #[test]
    fn reduction_matches_critical_points() {
        let b = partial_product(9).unwrap();
        let set = critical_points(&b).unwrap();
        let found: Vec<Complex> = set
            .all()
            .filter_map(|c| c.point.finite())
            .filter(|p| p.norm() > 1e-6)
            .collect();
        let reduced = reduced_critical_points();
        assert_eq!(reduced.len(), 12);
        for z in &reduced {
            let d = found
                .iter()
                .map(|f| (f - z).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(d < 1e-8, "{z} off by {d}");
        }
    }

    #[test]
    fn nine_factor_boundaries() {
        let (b, cont) = partial_boundaries(9, 2000).unwrap();
        assert_eq!(cont.curves.len(), 9);
        let third = std::f64::consts::TAU / 3.0;
        for cv in &cont.curves {
            let end = cv.samples.last().unwrap().z.finite().unwrap();
            let off = (end.arg() / third - (end.arg() / third).round()).abs();
            assert!(off < 1e-9, "endpoint {end}");
            assert!(cv.end_label.starts_with("1/abar"));
            for s in &cv.samples {
                let res = b.evaluate(s.z).abs_diff(&s.w) / s.w.norm().max(1.0);
                assert!(s.w.is_infinite() || res <= 1e-8);
            }
        }
        // three loops pass close to infinity, each contributing two unbounded rays
        let far = |c: &crate::curve::ParamCurve| {
            c.points()
                .filter_map(|z| z.finite())
                .map(|z| z.norm())
                .fold(0.0, f64::max)
        };
        assert_eq!(cont.curves.iter().filter(|c| far(c) > 10.0).count(), 3);
    }

    #[test]
    fn compact_set_membership() {
        assert!(in_compact(Complex::new(0.0, 0.0)));
        assert!(!in_compact(Complex::new(0.97, 0.0)));
        assert!(!in_compact(Complex::new(2.5, 0.0)));
    }

    #[test]
    fn polyline_distance_basic() {
        let line = vec![
            ExtComplex::Finite(Complex::new(0.0, 0.0)),
            ExtComplex::Finite(Complex::new(2.0, 0.0)),
            INF,
        ];
        assert!((polyline_distance(Complex::new(1.0, 0.5), &line) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn grid_matches_brute_force() {
        let to = vec![vec![
            ExtComplex::Finite(Complex::new(-1.5, 0.0)),
            ExtComplex::Finite(Complex::new(1.5, 0.3)),
            INF,
            ExtComplex::Finite(Complex::new(0.0, 1.9)),
            ExtComplex::Finite(Complex::new(0.2, -1.9)),
        ]];
        let from: Vec<Vec<ExtComplex>> = vec![(0..400)
            .map(|k| {
                ExtComplex::Finite(Complex::from_polar(
                    1.9 * ((k * 37 % 100) as f64 / 100.0),
                    k as f64 * 0.7,
                ))
            })
            .collect()];
        let brute: Vec<Complex> = from[0]
            .iter()
            .filter_map(|z| z.finite())
            .filter(|&z| in_compact(z) && to.iter().all(|c| polyline_distance(z, c) > 0.05))
            .collect();
        assert_eq!(unmatched_points(&from, &to, 0.05), brute);
    }
}
