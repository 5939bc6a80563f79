//! Points of the Riemann sphere and Möbius maps acting on them.

use std::fmt;

use num_complex::Complex64;

use crate::error::{reject, Error, Result};

pub type Complex = Complex64;

/// Default absolute tolerance for point comparisons.
pub const POINT_TOL: f64 = 1e-10;

const DET_TOL: f64 = 1e-14;

/// A point of the extended complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtComplex {
    Finite(Complex),
    Infinity,
}

pub use ExtComplex::Infinity as INF;

impl ExtComplex {
    /// Builds a point from parts. Infinite parts give `Infinity`, NaN is rejected.
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if re.is_nan() || im.is_nan() {
            return reject("NaN coordinate");
        }
        if re.is_infinite() || im.is_infinite() {
            return Ok(INF);
        }
        Ok(ExtComplex::Finite(Complex::new(re, im)))
    }

    pub fn try_from_complex(z: Complex) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, INF)
    }

    pub fn finite(&self) -> Option<Complex> {
        match *self {
            ExtComplex::Finite(z) => Some(z),
            INF => None,
        }
    }

    /// Modulus, `f64::INFINITY` at the point at infinity.
    pub fn norm(&self) -> f64 {
        match self {
            ExtComplex::Finite(z) => z.norm(),
            INF => f64::INFINITY,
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            ExtComplex::Finite(z) => ExtComplex::Finite(z.conj()),
            INF => INF,
        }
    }

    /// `1/z` with `0 <-> INF`.
    pub fn recip(&self) -> Self {
        match *self {
            ExtComplex::Finite(z) if z == Complex::new(0.0, 0.0) => INF,
            ExtComplex::Finite(z) => ExtComplex::Finite(z.inv()),
            INF => ExtComplex::Finite(Complex::new(0.0, 0.0)),
        }
    }

    /// Reflection across the unit circle, `1/conj(z)`.
    pub fn reflect(&self) -> Self {
        self.conj().recip()
    }

    /// Product on the sphere. `0 * INF` has no value and is reported as `None`.
    pub fn mul(&self, other: &Self) -> Option<Self> {
        match (*self, *other) {
            (ExtComplex::Finite(a), ExtComplex::Finite(b)) => Some(ExtComplex::from(a * b)),
            (ExtComplex::Finite(a), INF) | (INF, ExtComplex::Finite(a)) => {
                if a == Complex::new(0.0, 0.0) {
                    None
                } else {
                    Some(INF)
                }
            }
            (INF, INF) => Some(INF),
        }
    }

    /// Chordal distance on the Riemann sphere of diameter 2.
    pub fn chordal(&self, other: &Self) -> f64 {
        chordal(*self, *other)
    }

    /// Absolute distance for finite pairs, `0` for two infinities, `inf` otherwise.
    pub fn abs_diff(&self, other: &Self) -> f64 {
        match (self, other) {
            (ExtComplex::Finite(a), ExtComplex::Finite(b)) => (a - b).norm(),
            (INF, INF) => 0.0,
            _ => f64::INFINITY,
        }
    }

    /// Finite points within `tol` of each other, or both infinite.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.abs_diff(other) <= tol
    }
}

impl From<Complex> for ExtComplex {
    /// Non-finite parts become `INF`. NaN inputs trip a debug assertion.
    fn from(z: Complex) -> Self {
        debug_assert!(!z.re.is_nan() && !z.im.is_nan(), "NaN point");
        if z.re.is_finite() && z.im.is_finite() {
            ExtComplex::Finite(z)
        } else {
            INF
        }
    }
}

impl fmt::Display for ExtComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtComplex::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
            INF => write!(f, "inf"),
        }
    }
}

/// Chordal distance `2|z-w| / sqrt((1+|z|^2)(1+|w|^2))`.
pub fn chordal(z: ExtComplex, w: ExtComplex) -> f64 {
    match (z, w) {
        (ExtComplex::Finite(a), ExtComplex::Finite(b)) => {
            // large moduli go through the reciprocal to avoid overflow
            if a.norm() > 1.0 && b.norm() > 1.0 {
                let (ia, ib) = (a.inv(), b.inv());
                2.0 * (ia - ib).norm() / ((1.0 + ia.norm_sqr()) * (1.0 + ib.norm_sqr())).sqrt()
            } else {
                2.0 * (a - b).norm() / ((1.0 + a.norm_sqr()) * (1.0 + b.norm_sqr())).sqrt()
            }
        }
        (ExtComplex::Finite(a), INF) | (INF, ExtComplex::Finite(a)) => {
            let r = a.norm();
            if r > 1.0 {
                2.0 / r / (1.0 + 1.0 / (r * r)).sqrt()
            } else {
                2.0 / (1.0 + r * r).sqrt()
            }
        }
        (INF, INF) => 0.0,
    }
}

/// `e^{i theta}`.
pub fn cis(theta: f64) -> Complex {
    Complex::new(theta.cos(), theta.sin())
}

/// `k`-th of the `n` roots of unity.
pub fn root_of_unity(k: i64, n: u32) -> Complex {
    cis(2.0 * std::f64::consts::PI * (k.rem_euclid(n as i64) as f64) / n as f64)
}

/// Argument in `[0, 2pi)`.
pub fn arg_2pi(z: Complex) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + 2.0 * std::f64::consts::PI
    } else {
        a
    }
}

/// A non-degenerate map `z -> (a z + b) / (c z + d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub a: Complex,
    pub b: Complex,
    pub c: Complex,
    pub d: Complex,
}

impl Mobius {
    pub fn new(a: Complex, b: Complex, c: Complex, d: Complex) -> Result<Self> {
        let scale = [a, b, c, d].iter().map(|x| x.norm()).fold(0.0, f64::max);
        let m = Mobius { a, b, c, d };
        if !(scale > 0.0) || !scale.is_finite() || m.det().norm() <= DET_TOL * scale * scale {
            return Err(Error::Degenerate("Möbius determinant vanishes".into()));
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        let (one, zero) = (Complex::new(1.0, 0.0), Complex::new(0.0, 0.0));
        Mobius {
            a: one,
            b: zero,
            c: zero,
            d: one,
        }
    }

    /// `z -> lambda z`.
    pub fn scaling(lambda: Complex) -> Result<Self> {
        Mobius::new(
            lambda,
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(1.0, 0.0),
        )
    }

    pub fn det(&self) -> Complex {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, z: ExtComplex) -> ExtComplex {
        match z {
            INF => {
                if self.c == Complex::new(0.0, 0.0) {
                    INF
                } else {
                    ExtComplex::from(self.a / self.c)
                }
            }
            ExtComplex::Finite(z) => {
                let num = self.a * z + self.b;
                let den = self.c * z + self.d;
                let slack = 4.0 * f64::EPSILON * (self.c.norm() * z.norm() + self.d.norm());
                if den.norm() <= slack {
                    INF
                } else {
                    ExtComplex::from(num / den)
                }
            }
        }
    }

    /// Applies the map to a finite point, giving `INF` at the pole.
    pub fn apply_c(&self, z: Complex) -> ExtComplex {
        self.apply(ExtComplex::Finite(z))
    }

    /// `self ∘ other`, normalized.
    pub fn compose(&self, other: &Mobius) -> Mobius {
        Mobius {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
        .normalized()
    }

    pub fn inverse(&self) -> Mobius {
        Mobius {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
        .normalized()
    }

    /// Scales so the largest coefficient has modulus one.
    pub fn normalized(&self) -> Mobius {
        let coefs = [self.a, self.b, self.c, self.d];
        let big = coefs
            .iter()
            .copied()
            .max_by(|x, y| x.norm().total_cmp(&y.norm()))
            .unwrap();
        let s = big.norm();
        Mobius {
            a: self.a / s,
            b: self.b / s,
            c: self.c / s,
            d: self.d / s,
        }
    }

    /// Equality up to a global scalar: all 2x2 minors of the stacked
    /// normalized coefficient vectors vanish.
    pub fn approx_eq(&self, other: &Mobius, tol: f64) -> bool {
        let u = self.normalized();
        let v = other.normalized();
        let uu = [u.a, u.b, u.c, u.d];
        let vv = [v.a, v.b, v.c, v.d];
        for i in 0..4 {
            for j in (i + 1)..4 {
                if (uu[i] * vv[j] - uu[j] * vv[i]).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// `z -> conj(a)/|a| * (a - z)/(1 - conj(a) z)`.
    pub fn blaschke_factor(a: Complex) -> Result<Mobius> {
        let r = a.norm();
        if !(r > 0.0 && r < 1.0) {
            return reject(format!("factor zero {a} must satisfy 0 < |a| < 1"));
        }
        let e = a.conj() / r;
        Mobius::new(-e, e * a, -a.conj(), Complex::new(1.0, 0.0))
    }
}
