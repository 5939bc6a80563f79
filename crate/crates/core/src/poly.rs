//! Dense complex polynomials and simultaneous root finding.

use crate::complex_plane::Complex;
use crate::error::{Error, Result};

/// Coefficients in ascending order of degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<Complex>);

impl Poly {
    pub fn constant(c: Complex) -> Poly {
        Poly(vec![c])
    }

    /// `c0 + c1 z`.
    pub fn linear(c0: Complex, c1: Complex) -> Poly {
        Poly(vec![c0, c1])
    }

    /// Formal degree, including leading zeros.
    pub fn len_degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, z: Complex) -> Complex {
        self.0
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative.
    pub fn eval_d(&self, z: Complex) -> (Complex, Complex) {
        let mut p = Complex::new(0.0, 0.0);
        let mut dp = Complex::new(0.0, 0.0);
        for &c in self.0.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `sum |c_k| |z|^k`, the scale used for backward error.
    pub fn eval_abs(&self, r: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly(Vec::new());
        }
        let mut out = vec![Complex::new(0.0, 0.0); self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let zero = Complex::new(0.0, 0.0);
        Poly(
            (0..n)
                .map(|k| *self.0.get(k).unwrap_or(&zero) + *other.0.get(k).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex) -> Poly {
        Poly(self.0.iter().map(|&c| c * s).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(Complex::new(-1.0, 0.0)))
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly(vec![Complex::new(0.0, 0.0)]);
        }
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn pow(&self, m: u32) -> Poly {
        let mut out = Poly::constant(Complex::new(1.0, 0.0));
        for _ in 0..m {
            out = out.mul(self);
        }
        out
    }

    pub fn max_coef(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Coefficients split into roots at the origin, a core polynomial, and
/// roots at infinity (lost leading degree).
#[derive(Debug, Clone)]
pub struct Deflated {
    pub at_zero: usize,
    pub core: Poly,
    pub at_infinity: usize,
}

/// Strips coefficients below `rel_tol * max|c|` from both ends.
pub fn deflate(p: &Poly, rel_tol: f64) -> Deflated {
    let scale = p.max_coef();
    let small = |c: &Complex| c.norm() <= rel_tol * scale;
    let lo = p.0.iter().take_while(|c| small(c)).count();
    if lo == p.0.len() {
        return Deflated {
            at_zero: 0,
            core: Poly(vec![Complex::new(0.0, 0.0)]),
            at_infinity: 0,
        };
    }
    let hi = p.0.iter().rev().take_while(|c| small(c)).count();
    Deflated {
        at_zero: lo,
        core: Poly(p.0[lo..p.0.len() - hi].to_vec()),
        at_infinity: hi,
    }
}

/// Limits for [`aberth`].
#[derive(Debug, Clone, Copy)]
pub struct AberthOptions {
    pub max_sweeps: usize,
    pub jitter: f64,
}

impl Default for AberthOptions {
    fn default() -> Self {
        AberthOptions {
            max_sweeps: 500,
            jitter: 1e-3,
        }
    }
}

/// Initial radii from the upper convex hull of `(k, log|c_k|)`.
fn initial_radii(p: &Poly) -> Vec<f64> {
    let n = p.len_degree();
    let pts: Vec<(f64, f64)> =
        p.0.iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(k, c)| (k as f64, c.norm().ln()))
            .collect();
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &q in &pts {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (a.0 - o.0) * (q.1 - o.1) - (a.1 - o.1) * (q.0 - o.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(q);
    }
    let mut radii = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let (k0, l0) = w[0];
        let (k1, l1) = w[1];
        let r = ((l0 - l1) / (k1 - k0)).exp();
        for _ in 0..(k1 - k0) as usize {
            radii.push(r);
        }
    }
    radii
}

/// All roots of `p` (leading and trailing coefficients must be nonzero).
pub fn aberth(p: &Poly, opts: AberthOptions) -> Result<Vec<Complex>> {
    let n = p.len_degree();
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = p.0[n];
    if lead == Complex::new(0.0, 0.0) {
        return Err(Error::Degenerate("leading coefficient is zero".into()));
    }
    if p.0[0] == Complex::new(0.0, 0.0) {
        let zeros = p.0.iter().take_while(|c| c.norm() == 0.0).count();
        let mut rest = aberth(&Poly(p.0[zeros..].to_vec()), opts)?;
        rest.extend(std::iter::repeat_n(Complex::new(0.0, 0.0), zeros));
        return Ok(rest);
    }
    if n == 1 {
        return Ok(vec![-p.0[0] / lead]);
    }
    let radii = initial_radii(p);
    let mut z: Vec<Complex> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            let r = radii[k] * (1.0 + opts.jitter * ((k * 7 + 3) % 11) as f64 / 11.0);
            Complex::new(r * theta.cos(), r * theta.sin())
        })
        .collect();
    let mut done = vec![false; n];
    let eps = f64::EPSILON;
    for _ in 0..opts.max_sweeps {
        let mut all = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let zi = z[i];
            let (v, dv) = p.eval_d(zi);
            if v.norm() <= 8.0 * eps * p.eval_abs(zi.norm()) {
                done[i] = true;
                continue;
            }
            all = false;
            let ratio = v / dv;
            let sum: Complex = (0..n).filter(|&j| j != i).map(|j| (zi - z[j]).inv()).sum();
            let mut step = ratio / (Complex::new(1.0, 0.0) - ratio * sum);
            if !step.re.is_finite() || !step.im.is_finite() {
                step = ratio;
            }
            if !step.re.is_finite() || !step.im.is_finite() {
                step = Complex::new(1e-8 * (1.0 + zi.norm()), 0.0);
            }
            z[i] = zi - step;
            if step.norm() <= 2.0 * eps * z[i].norm() {
                done[i] = true;
            }
        }
        if all {
            return Ok(z);
        }
    }
    if done.iter().all(|&d| d) {
        return Ok(z);
    }
    Err(Error::SolverFail {
        sweeps: opts.max_sweeps,
    })
}

/// Newton steps on `p` that are kept only when they reduce `|p|`.
pub fn polish(p: &Poly, z: Complex, steps: usize) -> Complex {
    let mut z = z;
    let mut fz = p.eval(z).norm();
    for _ in 0..steps {
        let (v, dv) = p.eval_d(z);
        if dv.norm() == 0.0 {
            break;
        }
        let cand = z - v / dv;
        let fc = p.eval(cand).norm();
        if fc <= fz {
            z = cand;
            fz = fc;
        } else {
            break;
        }
    }
    z
}

/// Groups points closer than `radius` (single linkage). Each group is
/// reported by its centroid and size, in order of first appearance.
pub fn cluster(points: &[Complex], radius: f64) -> Vec<(Complex, u32)> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut j = i;
        while p[j] != r {
            let next = p[j];
            p[j] = r;
            j = next;
        }
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (points[i] - points[j]).norm() < radius {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj.max(ri)] = rj.min(ri);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Complex, u32)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => {
                g.1 += points[i];
                g.2 += 1;
            }
            None => groups.push((r, points[i], 1)),
        }
    }
    groups
        .into_iter()
        .map(|(_, s, m)| (s / m as f64, m))
        .collect()
}
