//! Zeros of `B'`: closed forms for the structured families and a general solver.

use crate::complex_plane::{cis, root_of_unity, Complex, ExtComplex, INF};
use crate::error::{reject, Error, Result};
use crate::poly::{aberth, cluster, deflate, AberthOptions, Poly};
use crate::product::{BlaschkeProduct, FamilySpec};

/// Distance below which numerically found roots are merged.
pub const CLUSTER_RADIUS: f64 = 1e-7;

/// A critical point with its order (multiplicity as a zero of `B'`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub point: ExtComplex,
    pub order: u32,
}

/// Critical points split by the unit circle.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalSet {
    pub interior: Vec<CriticalPoint>,
    pub exterior: Vec<CriticalPoint>,
    /// `B` at each interior point, in the same order.
    pub images: Vec<ExtComplex>,
}

impl CriticalSet {
    fn from_interior(b: &BlaschkeProduct, interior: Vec<(Complex, u32)>) -> CriticalSet {
        let interior: Vec<CriticalPoint> = interior
            .into_iter()
            .filter(|&(_, m)| m > 0)
            .map(|(p, m)| CriticalPoint {
                point: ExtComplex::Finite(p),
                order: m,
            })
            .collect();
        let exterior = interior
            .iter()
            .map(|c| CriticalPoint {
                point: c.point.reflect(),
                order: c.order,
            })
            .collect();
        let images = interior.iter().map(|c| b.evaluate(c.point)).collect();
        CriticalSet {
            interior,
            exterior,
            images,
        }
    }

    /// Interior count with multiplicity.
    pub fn interior_count(&self) -> u32 {
        self.interior.iter().map(|c| c.order).sum()
    }

    /// Count on the whole sphere with multiplicity.
    pub fn total_count(&self) -> u32 {
        self.interior_count() + self.exterior.iter().map(|c| c.order).sum::<u32>()
    }

    /// Order of the critical point at `z` (0 if none within `tol`, chordal).
    pub fn order_at(&self, z: ExtComplex, tol: f64) -> u32 {
        self.interior
            .iter()
            .chain(&self.exterior)
            .filter(|c| c.point.chordal(&z) <= tol)
            .map(|c| c.order)
            .sum()
    }

    /// All critical points.
    pub fn all(&self) -> impl Iterator<Item = &CriticalPoint> {
        self.interior.iter().chain(&self.exterior)
    }

    /// Distinct critical values on the sphere.
    pub fn values(&self, b: &BlaschkeProduct) -> Vec<ExtComplex> {
        let mut out: Vec<ExtComplex> = Vec::new();
        for c in self.all() {
            let w = b.evaluate(c.point);
            if !out.iter().any(|v| v.chordal(&w) < 1e-12) {
                out.push(w);
            }
        }
        out
    }
}

/// `a = a1 a2 (conj(a1) + conj(a2)) - (a1 + a2)`, `c = 1 - |a1|^2 |a2|^2`.
pub fn two_zeros_coefficients(a1: Complex, a2: Complex) -> (Complex, f64) {
    let a = a1 * a2 * (a1.conj() + a2.conj()) - (a1 + a2);
    let c = 1.0 - a1.norm_sqr() * a2.norm_sqr();
    (a, c)
}

/// The simple interior critical point `b` of `b1^n b2^n`, root of
/// `conj(a) z^2 + 2 c z + a = 0` inside the disk.
pub fn two_zeros_simple_point(a1: Complex, a2: Complex) -> Result<Complex> {
    let (a, c) = two_zeros_coefficients(a1, a2);
    if a.norm() <= 1e-14 {
        return Err(Error::Degenerate(
            "a1 a2 (conj a1 + conj a2) = a1 + a2".into(),
        ));
    }
    let s = (c * c - a.norm_sqr()).sqrt();
    // the roots are -(c -/+ s)/conj(a); their product has modulus one
    let inside = -a / (c + s);
    Ok(inside)
}

/// Critical points of `b1^n b2^n`.
pub fn critical_two_zeros(a1: Complex, a2: Complex, n: u32) -> Result<CriticalSet> {
    let b = BlaschkeProduct::build(&FamilySpec::TwoZeros { a1, a2, n })?;
    let p = two_zeros_simple_point(a1, a2)?;
    Ok(CriticalSet::from_interior(
        &b,
        vec![(a1, n - 1), (a2, n - 1), (p, 1)],
    ))
}

/// `rho_2^n` and `rho_1^n` for aligned rings, `rho_1 rho_2 = 1`.
pub fn aligned_ring_radii(r1: f64, r2: f64, n: u32) -> (f64, f64) {
    let s = (r1 * r2).powi(n as i32);
    let q = r1.powi(n as i32) + r2.powi(n as i32);
    let d = ((s + 1.0) * (s + 1.0) - q * q).sqrt();
    let inner = q / (s + 1.0 + d);
    let outer = (s + 1.0 + d) / q;
    (inner.powf(1.0 / n as f64), outer.powf(1.0 / n as f64))
}

/// Critical points of the two-ring family with a common angle.
pub fn critical_two_rings_aligned(r1: f64, r2: f64, alpha: f64, n: u32) -> Result<CriticalSet> {
    let spec = FamilySpec::TwoRings {
        r1,
        alpha1: alpha,
        r2,
        alpha2: alpha,
        n,
    };
    let b = BlaschkeProduct::build(&spec)?;
    let (rho2, rho1) = aligned_ring_radii(r1, r2, n);
    let mut interior = vec![(Complex::new(0.0, 0.0), n - 1)];
    let mut exterior = vec![CriticalPoint {
        point: INF,
        order: n - 1,
    }];
    for k in 0..n {
        let dir = cis(alpha) * root_of_unity(k as i64, n);
        interior.push((dir * rho2, 1));
        exterior.push(CriticalPoint {
            point: ExtComplex::Finite(dir * rho1),
            order: 1,
        });
    }
    let mut set = CriticalSet::from_interior(&b, interior);
    set.exterior = exterior.into_iter().filter(|c| c.order > 0).collect();
    Ok(set)
}

/// `A` for rings with zeros `a w_k`, `b w_k`.
pub fn two_rings_coefficient(r1: f64, alpha1: f64, r2: f64, alpha2: f64, n: u32) -> Complex {
    let an = cis(alpha1 * n as f64) * r1.powi(n as i32);
    let bn = cis(alpha2 * n as f64) * r2.powi(n as i32);
    let s = (r1 * r2).powi(2 * n as i32);
    (an + bn - an * bn * (an.conj() + bn.conj())) / (1.0 - s)
}

/// Critical points of the two-ring family from
/// `z^{n-1} (conj(A) z^{2n} - 2 z^n + A) = 0`.
pub fn critical_two_rings(
    r1: f64,
    alpha1: f64,
    r2: f64,
    alpha2: f64,
    n: u32,
) -> Result<CriticalSet> {
    let b = BlaschkeProduct::build(&FamilySpec::TwoRings {
        r1,
        alpha1,
        r2,
        alpha2,
        n,
    })?;
    let a = two_rings_coefficient(r1, alpha1, r2, alpha2, n);
    if a.norm() <= 1e-14 {
        let mut set = CriticalSet::from_interior(&b, vec![(Complex::new(0.0, 0.0), 2 * n - 1)]);
        set.exterior = vec![CriticalPoint {
            point: INF,
            order: 2 * n - 1,
        }];
        return Ok(set);
    }
    let u = a / (1.0 + (1.0 - a.norm_sqr()).sqrt());
    let (rho, phi) = u.to_polar();
    let mut interior = vec![(Complex::new(0.0, 0.0), n - 1)];
    for k in 0..n {
        let z = cis((phi + 2.0 * std::f64::consts::PI * k as f64) / n as f64)
            * rho.powf(1.0 / n as f64);
        interior.push((z, 1));
    }
    Ok(CriticalSet::from_interior(&b, interior))
}

/// Critical points of an arbitrary product.
///
/// Multiple zeros and poles contribute directly; the rest are the roots of
/// the numerator of `B'/B`, polished by Newton steps on `B'/B`.
pub fn critical_general(b: &BlaschkeProduct) -> Result<CriticalSet> {
    let zeros = b.zeros();
    let mut interior: Vec<(Complex, u32)> = zeros
        .iter()
        .map(|z| (z.point, z.multiplicity - 1))
        .collect();
    if b.degree() < 2 {
        return Ok(CriticalSet::from_interior(b, interior));
    }
    let one = Complex::new(1.0, 0.0);
    let mut r = Poly(vec![Complex::new(0.0, 0.0)]);
    for (k, zk) in zeros.iter().enumerate() {
        let mut term = Poly::constant(Complex::new(
            zk.multiplicity as f64 * (zk.point.norm_sqr() - 1.0),
            0.0,
        ));
        for (j, zj) in zeros.iter().enumerate() {
            if j != k {
                term = term
                    .mul(&Poly::linear(zj.point, -one))
                    .mul(&Poly::linear(one, -zj.point.conj()));
            }
        }
        r = r.add(&term);
    }
    let d = deflate(&r, 1e-12);
    let mut roots: Vec<Complex> = aberth(&d.core, AberthOptions::default())?;
    for z in roots.iter_mut() {
        *z = polish_log_derivative(b, *z, 2);
    }
    let mut exterior_extra: Vec<CriticalPoint> = Vec::new();
    if d.at_zero > 0 {
        interior.push((Complex::new(0.0, 0.0), d.at_zero as u32));
    }
    if d.at_infinity > 0 {
        exterior_extra.push(CriticalPoint {
            point: INF,
            order: d.at_infinity as u32,
        });
    }
    let mut inside = Vec::new();
    for (p, m) in cluster(&roots, CLUSTER_RADIUS) {
        if p.norm() < 1.0 {
            inside.push((p, m));
        } else {
            exterior_extra.push(CriticalPoint {
                point: ExtComplex::Finite(p),
                order: m,
            });
        }
    }
    interior.extend(inside);
    let interior: Vec<CriticalPoint> = interior
        .into_iter()
        .filter(|&(_, m)| m > 0)
        .map(|(p, m)| CriticalPoint {
            point: ExtComplex::Finite(p),
            order: m,
        })
        .collect();
    let mut exterior: Vec<CriticalPoint> = zeros
        .iter()
        .filter(|z| z.multiplicity > 1)
        .map(|z| CriticalPoint {
            point: ExtComplex::Finite(z.point.conj().inv()),
            order: z.multiplicity - 1,
        })
        .collect();
    exterior.extend(exterior_extra);
    let images = interior.iter().map(|c| b.evaluate(c.point)).collect();
    Ok(CriticalSet {
        interior,
        exterior,
        images,
    })
}

/// Newton steps on `B'/B`, kept while they reduce its modulus.
fn polish_log_derivative(b: &BlaschkeProduct, z: Complex, steps: usize) -> Complex {
    let mut z = z;
    let mut fz = b.log_derivative(z).0.norm();
    for _ in 0..steps {
        let (l, dl) = b.log_derivative(z);
        if dl.norm() == 0.0 || !fz.is_finite() {
            break;
        }
        let cand = z - l / dl;
        let fc = b.log_derivative(cand).0.norm();
        if fc.is_finite() && fc <= fz {
            z = cand;
            fz = fc;
        } else {
            break;
        }
    }
    z
}

/// Closed form when one applies, the general solver otherwise.
pub fn critical_points(b: &BlaschkeProduct) -> Result<CriticalSet> {
    match *b.spec() {
        FamilySpec::SinglePower { a, n } => Ok(CriticalSet::from_interior(b, vec![(a, n - 1)])),
        FamilySpec::TwoZeros { a1, a2, n } => match critical_two_zeros(a1, a2, n) {
            Err(Error::Degenerate(_)) => critical_general(b),
            other => other,
        },
        FamilySpec::TwoRings {
            r1,
            alpha1,
            r2,
            alpha2,
            n,
        } => critical_two_rings(r1, alpha1, r2, alpha2, n),
        _ => critical_general(b),
    }
}

/// `|B'(p)| (1 - |p|^2)` for an interior point, a scale-free size of the derivative.
pub fn scaled_derivative(b: &BlaschkeProduct, p: Complex) -> Result<f64> {
    if p.norm() >= 1.0 {
        return reject("interior point expected");
    }
    Ok(b.derivative(ExtComplex::Finite(p))?.norm() * (1.0 - p.norm_sqr()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product::ZeroSequence;
    use proptest::prelude::*;
    use std::f64::consts::{PI, TAU};

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    /// Roots of `P'Q - PQ'` by Weierstrass iteration.
    fn oracle_roots(b: &BlaschkeProduct) -> Vec<Complex> {
        let (p, q) = b.as_rational();
        let num = p.derivative().mul(&q).sub(&p.mul(&q.derivative()));
        let n = num
            .0
            .iter()
            .rposition(|x| x.norm() > 1e-13 * num.max_coef())
            .unwrap();
        let lead = num.0[n];
        let mono: Vec<Complex> = num.0[..=n].iter().map(|x| x / lead).collect();
        let eval = |z: Complex| mono.iter().rev().fold(c(0.0, 0.0), |acc, &x| acc * z + x);
        let mut z: Vec<Complex> = (0..n).map(|k| c(0.4, 0.9).powu(k as u32) * 1.1).collect();
        for _ in 0..20000 {
            let mut delta = 0.0f64;
            for i in 0..n {
                let mut den = c(1.0, 0.0);
                for j in 0..n {
                    if j != i {
                        den *= z[i] - z[j];
                    }
                }
                let step = eval(z[i]) / den;
                z[i] -= step;
                delta = delta.max(step.norm());
            }
            if delta < 1e-16 {
                break;
            }
        }
        z
    }

    /// Oracle roots away from the multiple zeros and poles of `B` and the
    /// origin, where a polynomial solver only resolves clusters.
    fn oracle(b: &BlaschkeProduct) -> Vec<(Complex, u32)> {
        let mut centers: Vec<Complex> = vec![c(0.0, 0.0)];
        for z in b.zeros().iter().filter(|z| z.multiplicity > 1) {
            centers.push(z.point);
            centers.push(z.point.conj().inv());
        }
        let far: Vec<Complex> = oracle_roots(b)
            .into_iter()
            .filter(|r| centers.iter().all(|p| (r - p).norm() > 0.05))
            .collect();
        cluster(&far, 1e-6)
    }

    fn hausdorff(a: &[Complex], b: &[Complex]) -> f64 {
        let d = |x: &Complex, s: &[Complex]| {
            s.iter()
                .map(|y| (x - y).norm())
                .fold(f64::INFINITY, f64::min)
        };
        a.iter()
            .map(|x| d(x, b))
            .chain(b.iter().map(|y| d(y, a)))
            .fold(0.0, f64::max)
    }

    fn simple_points(set: &CriticalSet) -> Vec<Complex> {
        set.all()
            .filter(|c| c.order == 1)
            .filter_map(|c| c.point.finite())
            .filter(|p| p.norm() > 0.05)
            .collect()
    }

    #[test]
    fn two_zeros_point_is_critical() {
        let (a1, a2) = (c(0.5, 1.0 / 3.0), cis(2.5) * 0.8);
        let set = critical_two_zeros(a1, a2, 6).unwrap();
        assert_eq!(set.interior_count(), 11);
        let b = BlaschkeProduct::build(&FamilySpec::TwoZeros { a1, a2, n: 6 }).unwrap();
        let p = set
            .interior
            .iter()
            .find(|c| c.order == 1)
            .unwrap()
            .point
            .finite()
            .unwrap();
        assert!(p.norm() < 1.0);
        assert!(b.derivative(ExtComplex::Finite(p)).unwrap().norm() < 1e-8);
        let orc: Vec<Complex> = oracle(&b)
            .into_iter()
            .filter(|x| x.1 == 1)
            .map(|x| x.0)
            .collect();
        assert!(hausdorff(&simple_points(&set), &orc) < 1e-8);
    }

    #[test]
    fn symmetric_pair_is_degenerate_and_general_finds_origin() {
        let r = c(0.6, 0.0);
        assert!(matches!(
            critical_two_zeros(r, -r, 3),
            Err(Error::Degenerate(_))
        ));
        let b = BlaschkeProduct::build(&FamilySpec::TwoZeros {
            a1: r,
            a2: -r,
            n: 3,
        })
        .unwrap();
        let set = critical_points(&b).unwrap();
        assert_eq!(set.order_at(ExtComplex::Finite(c(0.0, 0.0)), 1e-9), 1);
        // the closed form tends to the origin as the pair becomes symmetric
        let p = two_zeros_simple_point(r, -r + c(1e-9, 1e-9)).unwrap();
        assert!(p.norm() < 1e-8);
    }

    #[test]
    fn aligned_rings_properties() {
        let (r1, r2, alpha, n) = (0.6, 0.8, PI / 3.0, 4);
        let set = critical_two_rings_aligned(r1, r2, alpha, n).unwrap();
        let (rho2, rho1) = aligned_ring_radii(r1, r2, n);
        assert!((rho1 * rho2 - 1.0).abs() < 1e-12);
        assert!(r1 < rho2 && rho2 < r2);
        assert!(1.0 / r2 < rho1 && rho1 < 1.0 / r1);
        assert_eq!(set.interior.iter().filter(|c| c.order == 1).count(), 4);
        for (cp, w) in set.interior.iter().zip(&set.images) {
            if cp.order == 1 {
                let w = w.finite().unwrap();
                assert!(w.im.abs() < 1e-12 && -1.0 < w.re && w.re < 0.0);
            }
        }
        let b = BlaschkeProduct::build(&FamilySpec::TwoRings {
            r1,
            alpha1: alpha,
            r2,
            alpha2: alpha,
            n,
        })
        .unwrap();
        for cp in set.exterior.iter().filter(|c| c.order == 1) {
            let w = b.evaluate(cp.point).finite().unwrap();
            assert!(w.im.abs() < 1e-10 && w.re < -1.0);
        }
        let orc: Vec<Complex> = oracle(&b)
            .into_iter()
            .filter(|x| x.1 == 1)
            .map(|x| x.0)
            .collect();
        assert!(hausdorff(&simple_points(&set), &orc) < 1e-8);
    }

    #[test]
    fn coincident_rings() {
        let (rho2, rho1) = aligned_ring_radii(0.7, 0.7, 3);
        assert!((rho2 - 0.7).abs() < 1e-12 && (rho1 - 1.0 / 0.7).abs() < 1e-12);
    }

    #[test]
    fn single_power_only_multiple_zero() {
        let b = BlaschkeProduct::build(&FamilySpec::SinglePower {
            a: c(0.5, 1.0 / 3.0),
            n: 6,
        })
        .unwrap();
        for set in [critical_points(&b).unwrap(), critical_general(&b).unwrap()] {
            assert_eq!(set.interior.len(), 1);
            assert_eq!(set.interior[0].order, 5);
            assert!(set.interior[0]
                .point
                .approx_eq(&ExtComplex::Finite(c(0.5, 1.0 / 3.0)), 1e-12));
        }
    }

    #[test]
    fn general_rings_paths_agree() {
        let (r1, a1, r2, a2, n) = (0.45, 0.3, 0.75, 1.2, 4);
        let b = BlaschkeProduct::build(&FamilySpec::TwoRings {
            r1,
            alpha1: a1,
            r2,
            alpha2: a2,
            n,
        })
        .unwrap();
        let closed = critical_two_rings(r1, a1, r2, a2, n).unwrap();
        let general = critical_general(&b).unwrap();
        assert!(hausdorff(&simple_points(&closed), &simple_points(&general)) < 1e-8);
        let orc: Vec<Complex> = oracle(&b)
            .into_iter()
            .filter(|x| x.1 == 1)
            .map(|x| x.0)
            .collect();
        assert!(hausdorff(&simple_points(&closed), &orc) < 1e-8);
        assert_eq!(
            general.order_at(ExtComplex::Finite(c(0.0, 0.0)), 1e-9),
            n - 1
        );
        assert_eq!(general.order_at(INF, 1e-9), n - 1);
        let aligned = critical_two_rings_aligned(0.45, 0.75, PI / 3.0, n).unwrap();
        let via_a = critical_two_rings(0.45, PI / 3.0, 0.75, PI / 3.0, n).unwrap();
        assert!(hausdorff(&simple_points(&aligned), &simple_points(&via_a)) < 1e-10);
    }

    #[test]
    fn nine_factor_product_has_double_point_at_origin() {
        let spec = FamilySpec::PartialInfinite {
            rule: ZeroSequence::InverseSquare { symmetry: 3 },
            m: 9,
        };
        let b = BlaschkeProduct::build(&spec).unwrap();
        let set = critical_general(&b).unwrap();
        assert_eq!(set.order_at(ExtComplex::Finite(c(0.0, 0.0)), 1e-9), 2);
        assert_eq!(set.interior_count(), 8);
        assert_eq!(set.total_count(), 16);
    }

    fn mirror_ok(set: &CriticalSet) -> bool {
        let pts: Vec<(ExtComplex, u32)> = set.all().map(|c| (c.point, c.order)).collect();
        pts.iter().all(|(p, m)| {
            let q = p.reflect();
            pts.iter()
                .filter(|(x, _)| x.chordal(&q) <= 1e-9)
                .map(|x| x.1)
                .sum::<u32>()
                == *m
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn riemann_hurwitz_and_mirror(re in proptest::collection::vec(-0.65f64..0.65, 5),
                                      im in proptest::collection::vec(-0.65f64..0.65, 5)) {
            let pts: Vec<Complex> = re.iter().zip(&im).map(|(&a, &b)| c(a, b)).filter(|z| z.norm() > 0.05).collect();
            prop_assume!(pts.len() >= 2);
            let b = BlaschkeProduct::from_zeros(&pts).unwrap();
            let set = critical_general(&b).unwrap();
            prop_assert_eq!(set.interior_count(), b.degree() - 1);
            prop_assert_eq!(set.total_count(), 2 * b.degree() - 2);
            prop_assert!(mirror_ok(&set));
            for cp in &set.interior {
                let p = cp.point.finite().unwrap();
                prop_assert!(scaled_derivative(&b, p).unwrap() <= 1e-8);
            }
        }

        #[test]
        fn two_zero_closed_form_is_critical(r1 in 0.1f64..0.9, t1 in 0.0f64..TAU, r2 in 0.1f64..0.9, t2 in 0.0f64..TAU, n in 1u32..7) {
            let (a1, a2) = (cis(t1) * r1, cis(t2) * r2);
            prop_assume!((a1 - a2).norm() > 0.05);
            prop_assume!(two_zeros_coefficients(a1, a2).0.norm() > 1e-6);
            let set = critical_two_zeros(a1, a2, n).unwrap();
            let b = BlaschkeProduct::build(&FamilySpec::TwoZeros { a1, a2, n }).unwrap();
            prop_assert_eq!(set.interior_count(), 2 * n - 1);
            for cp in &set.interior {
                prop_assert!(scaled_derivative(&b, cp.point.finite().unwrap()).unwrap() <= 1e-8);
            }
        }
    }
}
