//! Finite Blaschke products and the families built from them.

use serde::{Deserialize, Serialize};

use crate::complex_plane::{cis, root_of_unity, Complex, ExtComplex, Mobius, INF};
use crate::error::{reject, Error, Result};
use crate::poly::Poly;

const MERGE_TOL: f64 = 1e-14;
const POLE_TOL: f64 = 1e-13;
/// Newton residual, relative to the target, treated as exact.
const RESIDUAL_FLOOR: f64 = 16.0 * f64::EPSILON;

/// A zero of the product with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    pub point: Complex,
    pub multiplicity: u32,
}

/// Rule generating the zeros of an infinite product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ZeroSequence {
    /// `a_n^(k) = (1 - 1/(n+1)^2) w_k` over the `symmetry`-th roots of unity.
    InverseSquare { symmetry: u32 },
}

impl ZeroSequence {
    /// The first `m` zeros in order of non-decreasing modulus.
    pub fn take(&self, m: usize) -> Vec<Complex> {
        match *self {
            ZeroSequence::InverseSquare { symmetry } => {
                let s = symmetry as usize;
                (0..m)
                    .map(|i| {
                        let (n, k) = (i / s + 1, i % s);
                        let rho = 1.0 - 1.0 / ((n + 1) * (n + 1)) as f64;
                        root_of_unity(k as i64, symmetry) * rho
                    })
                    .collect()
            }
        }
    }

    /// Modulus of the `n`-th shell (`n >= 1`).
    pub fn shell_modulus(&self, n: usize) -> f64 {
        match *self {
            ZeroSequence::InverseSquare { .. } => 1.0 - 1.0 / ((n + 1) * (n + 1)) as f64,
        }
    }
}

/// Parameters of a product family.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    SinglePower {
        a: Complex,
        n: u32,
    },
    TwoZeros {
        a1: Complex,
        a2: Complex,
        n: u32,
    },
    Rotational {
        r: f64,
        alpha: f64,
        n: u32,
    },
    TwoRings {
        r1: f64,
        alpha1: f64,
        r2: f64,
        alpha2: f64,
        n: u32,
    },
    PartialInfinite {
        rule: ZeroSequence,
        m: usize,
    },
    Custom {
        zeros: Vec<Zero>,
    },
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::SinglePower { .. } => "single_power",
            FamilySpec::TwoZeros { .. } => "two_zeros",
            FamilySpec::Rotational { .. } => "rotational",
            FamilySpec::TwoRings { .. } => "two_rings",
            FamilySpec::PartialInfinite { .. } => "partial_infinite",
            FamilySpec::Custom { .. } => "custom",
        }
    }

    fn zeros(&self) -> Result<Vec<Zero>> {
        let check_n = |n: u32| {
            if n == 0 {
                reject("n must be at least 1")
            } else {
                Ok(())
            }
        };
        let in_disk = |a: Complex, what: &str| {
            if a.re.is_finite() && a.im.is_finite() && a.norm() > 0.0 && a.norm() < 1.0 {
                Ok(())
            } else {
                reject(format!("{what} = {a} must satisfy 0 < |{what}| < 1"))
            }
        };
        let ring = |r: f64, alpha: f64, n: u32| -> Vec<Zero> {
            (0..n)
                .map(|k| Zero {
                    point: cis(alpha) * root_of_unity(k as i64, n) * r,
                    multiplicity: 1,
                })
                .collect()
        };
        match self {
            FamilySpec::SinglePower { a, n } => {
                check_n(*n)?;
                in_disk(*a, "a")?;
                Ok(vec![Zero {
                    point: *a,
                    multiplicity: *n,
                }])
            }
            FamilySpec::TwoZeros { a1, a2, n } => {
                check_n(*n)?;
                in_disk(*a1, "a1")?;
                in_disk(*a2, "a2")?;
                if (a1 - a2).norm() <= MERGE_TOL {
                    return reject("a1 and a2 must differ");
                }
                Ok(vec![
                    Zero {
                        point: *a1,
                        multiplicity: *n,
                    },
                    Zero {
                        point: *a2,
                        multiplicity: *n,
                    },
                ])
            }
            FamilySpec::Rotational { r, alpha, n } => {
                check_n(*n)?;
                if !(*r > 0.0 && *r < 1.0) || !alpha.is_finite() {
                    return reject("rotational family needs 0 < r < 1");
                }
                Ok(ring(*r, *alpha, *n))
            }
            FamilySpec::TwoRings {
                r1,
                alpha1,
                r2,
                alpha2,
                n,
            } => {
                check_n(*n)?;
                if !(*r1 > 0.0 && r1 <= r2 && *r2 < 1.0)
                    || !alpha1.is_finite()
                    || !alpha2.is_finite()
                {
                    return reject("two-ring family needs 0 < r1 <= r2 < 1");
                }
                let mut z = ring(*r1, *alpha1, *n);
                z.extend(ring(*r2, *alpha2, *n));
                Ok(z)
            }
            FamilySpec::PartialInfinite { rule, m } => {
                if *m == 0 {
                    return reject("partial product needs at least one factor");
                }
                match rule {
                    ZeroSequence::InverseSquare { symmetry } if *symmetry == 0 => {
                        return reject("sequence symmetry must be at least 1")
                    }
                    _ => {}
                }
                Ok(rule
                    .take(*m)
                    .into_iter()
                    .map(|p| Zero {
                        point: p,
                        multiplicity: 1,
                    })
                    .collect())
            }
            FamilySpec::Custom { zeros } => {
                if zeros.is_empty() {
                    return reject("at least one zero is required");
                }
                for z in zeros {
                    in_disk(z.point, "zero")?;
                    if z.multiplicity == 0 {
                        return reject("multiplicity must be positive");
                    }
                }
                Ok(zeros.clone())
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Factor {
    a: Complex,
    m: u32,
    map: Mobius,
}

/// Which coordinate a computation runs in: `z` itself or `1/z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    Plane,
    Inverted,
}

/// Outcome of [`BlaschkeProduct::newton`].
#[derive(Debug, Clone)]
pub struct NewtonResult {
    pub z: ExtComplex,
    pub converged: bool,
    /// Step lengths in chart coordinates.
    pub steps: Vec<f64>,
}

/// `B(z) = prod (conj(a_k)/|a_k| (a_k - z)/(1 - conj(a_k) z))^{m_k}`.
#[derive(Debug, Clone)]
pub struct BlaschkeProduct {
    factors: Vec<Factor>,
    degree: u32,
    spec: FamilySpec,
}

impl BlaschkeProduct {
    pub fn build(spec: &FamilySpec) -> Result<Self> {
        let raw = spec.zeros()?;
        let mut merged: Vec<Zero> = Vec::new();
        for z in raw {
            match merged
                .iter_mut()
                .find(|m| (m.point - z.point).norm() <= MERGE_TOL)
            {
                Some(m) => m.multiplicity += z.multiplicity,
                None => merged.push(z),
            }
        }
        let factors = merged
            .iter()
            .map(|z| {
                Ok(Factor {
                    a: z.point,
                    m: z.multiplicity,
                    map: Mobius::blaschke_factor(z.point)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let degree = merged.iter().map(|z| z.multiplicity).sum();
        Ok(BlaschkeProduct {
            factors,
            degree,
            spec: spec.clone(),
        })
    }

    /// Product with the given zero points, each simple.
    pub fn from_zeros(points: &[Complex]) -> Result<Self> {
        let zeros = points
            .iter()
            .map(|&p| Zero {
                point: p,
                multiplicity: 1,
            })
            .collect();
        Self::build(&FamilySpec::Custom { zeros })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    pub fn zeros(&self) -> Vec<Zero> {
        self.factors
            .iter()
            .map(|f| Zero {
                point: f.a,
                multiplicity: f.m,
            })
            .collect()
    }

    /// Poles `1/conj(a_k)` with multiplicities.
    pub fn poles(&self) -> Vec<Zero> {
        self.factors
            .iter()
            .map(|f| Zero {
                point: f.a.conj().inv(),
                multiplicity: f.m,
            })
            .collect()
    }

    pub fn evaluate(&self, z: ExtComplex) -> ExtComplex {
        match z {
            INF => ExtComplex::from(Complex::new(self.value_at_infinity(), 0.0)),
            ExtComplex::Finite(z) => self.evaluate_finite(z),
        }
    }

    /// `B(INF) = prod |a_k|^{-m_k}`.
    pub fn value_at_infinity(&self) -> f64 {
        self.factors
            .iter()
            .map(|f| f.a.norm().powi(-(f.m as i32)))
            .product()
    }

    pub fn evaluate_finite(&self, z: Complex) -> ExtComplex {
        let mut num = Complex::new(1.0, 0.0);
        let mut den = Complex::new(1.0, 0.0);
        for f in &self.factors {
            let d = Complex::new(1.0, 0.0) - f.a.conj() * z;
            if d.norm() <= 4.0 * f64::EPSILON * (f.a.norm() * z.norm() + 1.0) {
                return INF;
            }
            let e = f.a.conj() / f.a.norm();
            let n = e * (f.a - z);
            if f.m == 1 {
                num *= n;
                den *= d;
            } else {
                num *= n.powu(f.m);
                den *= d.powu(f.m);
            }
        }
        ExtComplex::from(num / den)
    }

    /// `B'(z)` for finite `z` away from the poles.
    pub fn derivative(&self, z: ExtComplex) -> Result<ExtComplex> {
        let z = match z {
            ExtComplex::Finite(z) => z,
            INF => return reject("derivative is evaluated at finite points only"),
        };
        for f in &self.factors {
            if (z - f.a.conj().inv()).norm() <= POLE_TOL {
                return Err(Error::PoleInput { re: z.re, im: z.im });
            }
        }
        Ok(ExtComplex::from(self.eval_chart(z, Chart::Plane, false).1))
    }

    /// Value and derivative of `F(x)` where `F = B` (or `1/B` when
    /// `reciprocal`) and `z = x` or `z = 1/x` according to `chart`.
    pub fn eval_chart(&self, x: Complex, chart: Chart, reciprocal: bool) -> (Complex, Complex) {
        let k = self.factors.len();
        let mut vals = Vec::with_capacity(k);
        let mut ders = Vec::with_capacity(k);
        for f in &self.factors {
            let Mobius { a, b, c, d } = f.map;
            let (mut al, mut be, mut ga, mut de) = match chart {
                Chart::Plane => (a, b, c, d),
                Chart::Inverted => (b, a, d, c),
            };
            if reciprocal {
                std::mem::swap(&mut al, &mut ga);
                std::mem::swap(&mut be, &mut de);
            }
            let num = al * x + be;
            let den = ga * x + de;
            let v = num / den;
            let dv = (al * de - be * ga) / (den * den);
            let (p, dp) = if f.m == 1 {
                (v, dv)
            } else {
                let vm1 = v.powu(f.m - 1);
                (vm1 * v, vm1 * dv * f.m as f64)
            };
            vals.push(p);
            ders.push(dp);
        }
        let mut prefix = vec![Complex::new(1.0, 0.0); k + 1];
        for i in 0..k {
            prefix[i + 1] = prefix[i] * vals[i];
        }
        let mut suffix = Complex::new(1.0, 0.0);
        let mut deriv = Complex::new(0.0, 0.0);
        for i in (0..k).rev() {
            deriv += prefix[i] * ders[i] * suffix;
            suffix *= vals[i];
        }
        (prefix[k], deriv)
    }

    /// Newton iteration for `B(z) = w` from `start`, in the chart of the
    /// start point, on `B - w` or `1/B - 1/w` depending on `|w|`. Stops when
    /// the step falls below `tol` or the residual reaches rounding level.
    pub fn newton(
        &self,
        start: ExtComplex,
        w: ExtComplex,
        max_iter: usize,
        tol: f64,
    ) -> NewtonResult {
        let chart = if start.norm() <= 1.0 {
            Chart::Plane
        } else {
            Chart::Inverted
        };
        let mut x = match (chart, start) {
            (Chart::Plane, ExtComplex::Finite(z)) => z,
            (Chart::Inverted, z) => z.recip().finite().unwrap_or(Complex::new(0.0, 0.0)),
            (Chart::Plane, INF) => unreachable!(),
        };
        let recip = w.norm() > 1.0;
        let target = if recip {
            w.recip().finite().unwrap()
        } else {
            w.finite().unwrap()
        };
        let mut steps = Vec::with_capacity(max_iter);
        let mut converged = false;
        for _ in 0..max_iter {
            let (f, df) = self.eval_chart(x, chart, recip);
            if (f - target).norm() <= RESIDUAL_FLOOR * target.norm() {
                converged = true;
                break;
            }
            let dx = (f - target) / df;
            if !dx.re.is_finite() || !dx.im.is_finite() {
                break;
            }
            x -= dx;
            steps.push(dx.norm());
            if dx.norm() <= tol * x.norm().max(1.0) {
                converged = true;
                break;
            }
        }
        let z = match chart {
            Chart::Plane => ExtComplex::from(x),
            Chart::Inverted => ExtComplex::from(x).recip(),
        };
        NewtonResult {
            z,
            converged,
            steps,
        }
    }

    /// `B = P/Q` with `P = prod (conj(a)/|a| (a - z))^m`, `Q = prod (1 - conj(a) z)^m`.
    pub fn as_rational(&self) -> (Poly, Poly) {
        let mut p = Poly::constant(Complex::new(1.0, 0.0));
        let mut q = Poly::constant(Complex::new(1.0, 0.0));
        for f in &self.factors {
            let e = f.a.conj() / f.a.norm();
            let pf = Poly::linear(e * f.a, -e);
            let qf = Poly::linear(Complex::new(1.0, 0.0), -f.a.conj());
            p = p.mul(&pf.pow(f.m));
            q = q.mul(&qf.pow(f.m));
        }
        (p, q)
    }

    /// `sum m_k (|a_k|^2 - 1) / ((a_k - z)(1 - conj(a_k) z))`, which is `B'/B`.
    pub fn log_derivative(&self, z: Complex) -> (Complex, Complex) {
        let mut l = Complex::new(0.0, 0.0);
        let mut dl = Complex::new(0.0, 0.0);
        for f in &self.factors {
            let c = f.m as f64 * (f.a.norm_sqr() - 1.0);
            let u = f.a - z;
            let v = Complex::new(1.0, 0.0) - f.a.conj() * z;
            let g = u * v;
            l += c / g;
            let dg = -v - f.a.conj() * u;
            dl -= c * dg / (g * g);
        }
        (l, dl)
    }
}
