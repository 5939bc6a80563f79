//! Covering transformation groups and their composition tables.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex_plane::{cis, root_of_unity, Complex, ExtComplex, Mobius, INF};
use crate::critical::two_rings_coefficient;
use crate::error::{Error, Result};
use crate::preimage::principal_root;
use crate::product::{BlaschkeProduct, FamilySpec};

/// Seed of the sample points used to identify maps.
pub const SAMPLE_SEED: u64 = 0x5eed;
/// Number of sample points.
pub const SAMPLE_POINTS: usize = 200;
/// Pointwise tolerance (chordal) for identifying two maps.
pub const MAP_TOL: f64 = 1e-9;
const ROOT_GAP: f64 = 1e-6;

/// `n` pseudo-random points, uniform on the sphere.
pub fn sphere_points(n: usize, seed: u64) -> Vec<ExtComplex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let u: f64 = rng.random_range(-1.0..1.0);
            let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let rho = (1.0 - u * u).sqrt();
            ExtComplex::from(Complex::from_polar(rho / (1.0 - u), phi))
        })
        .collect()
}

/// An evaluable covering transformation.
#[derive(Debug, Clone, PartialEq)]
pub enum DeckMap {
    Mobius(Mobius),
    /// `S_k` of the two-zero family, followed by `U` when `flip` is set (`T_k`).
    TwoZeroBranch {
        a1: Complex,
        a2: Complex,
        n: u32,
        k: u32,
        flip: bool,
    },
    /// `z -> delta P(M(v)) w_{k+j}` with `v = (z/delta)^n`, `M(v) = (v - |A|)/(|A| v - 1)`,
    /// `P` the principal root and `k` the sector of `z/delta`.
    RingBranch {
        delta: Complex,
        abs_a: f64,
        n: u32,
        j: u32,
    },
    /// `f_1 o f_2 o ... o f_m`.
    Composite(Vec<DeckMap>),
}

impl DeckMap {
    pub fn apply(&self, z: ExtComplex) -> Result<ExtComplex> {
        match self {
            DeckMap::Mobius(m) => Ok(m.apply(z)),
            DeckMap::TwoZeroBranch { a1, a2, n, k, flip } => {
                let w = two_zero_branch(*a1, *a2, root_of_unity(*k as i64, *n), z)?;
                Ok(if *flip {
                    two_zero_involution(*a1, *a2).apply(w)
                } else {
                    w
                })
            }
            DeckMap::RingBranch { delta, abs_a, n, j } => ring_branch(*delta, *abs_a, *n, *j, z),
            DeckMap::Composite(maps) => maps.iter().rev().try_fold(z, |z, m| m.apply(z)),
        }
    }
}

/// `U(z) = (A - z)/(1 - conj(A) z)`, the involution with `U(a1) = a2`.
pub fn two_zero_involution(a1: Complex, a2: Complex) -> Mobius {
    let a = (a1 * a2 * (a1.conj() + a2.conj()) - (a1 + a2)) / (a1.norm_sqr() * a2.norm_sqr() - 1.0);
    Mobius::new(
        Complex::new(-1.0, 0.0),
        a,
        -a.conj(),
        Complex::new(1.0, 0.0),
    )
    .expect("|A| < 1")
}

/// `g(z) = (a1 - z)/(1 - conj(a1) z) (a2 - z)/(1 - conj(a2) z)`.
fn two_zero_g(a1: Complex, a2: Complex, z: ExtComplex) -> ExtComplex {
    match z {
        INF => ExtComplex::Finite(1.0 / (a1.conj() * a2.conj())),
        ExtComplex::Finite(z) => {
            let den = (1.0 - a1.conj() * z) * (1.0 - a2.conj() * z);
            if den.norm() == 0.0 {
                INF
            } else {
                ExtComplex::from((a1 - z) * (a2 - z) / den)
            }
        }
    }
}

fn two_zero_roots(a1: Complex, a2: Complex, u: Complex) -> [ExtComplex; 2] {
    crate::preimage::solve_quadratic(
        1.0 - u * a1.conj() * a2.conj(),
        -(a1 + a2) + u * (a1.conj() + a2.conj()),
        a1 * a2 - u,
    )
}

/// Root of `g(z) = v` continued from `a1` along `g(z) = s v`, `s` in `[0,1]`.
fn sheet_one(a1: Complex, a2: Complex, v: Complex) -> Result<ExtComplex> {
    let mut z = ExtComplex::Finite(a1);
    let mut s = 0.0;
    let mut h: f64 = 0.125;
    while s < 1.0 {
        let s1 = (s + h).min(1.0);
        let [r0, r1] = two_zero_roots(a1, a2, v * s1);
        let (d0, d1) = (r0.chordal(&z), r1.chordal(&z));
        if r0.chordal(&r1) < ROOT_GAP {
            return Err(Error::BranchAmbiguous { re: v.re, im: v.im });
        }
        if d0.min(d1) <= 0.25 * d0.max(d1) {
            z = if d0 <= d1 { r0 } else { r1 };
            s = s1;
            h = (2.0 * h).min(0.125);
        } else {
            h *= 0.5;
            if h < 1e-12 {
                return Err(Error::BranchAmbiguous { re: v.re, im: v.im });
            }
        }
    }
    Ok(z)
}

fn two_zero_branch(a1: Complex, a2: Complex, wk: Complex, z: ExtComplex) -> Result<ExtComplex> {
    let ambiguous = |z: ExtComplex| {
        let (re, im) = z
            .finite()
            .map_or((f64::INFINITY, f64::INFINITY), |c| (c.re, c.im));
        Error::BranchAmbiguous { re, im }
    };
    let ExtComplex::Finite(v) = two_zero_g(a1, a2, z) else {
        return Err(ambiguous(z));
    };
    let u = two_zero_involution(a1, a2);
    let here = sheet_one(a1, a2, v)?;
    let there = u.apply(here);
    let (d1, d2) = (here.chordal(&z), there.chordal(&z));
    if here.chordal(&there) < ROOT_GAP || d1.min(d2) > 1e-6 {
        return Err(ambiguous(z));
    }
    let image = sheet_one(a1, a2, v * wk)?;
    Ok(if d1 <= d2 { image } else { u.apply(image) })
}

fn ring_branch(delta: Complex, abs_a: f64, n: u32, j: u32, z: ExtComplex) -> Result<ExtComplex> {
    let ambiguous = |z: ExtComplex| {
        let (re, im) = z
            .finite()
            .map_or((f64::INFINITY, f64::INFINITY), |c| (c.re, c.im));
        Error::BranchAmbiguous { re, im }
    };
    let x = match z {
        ExtComplex::Finite(x) if x.norm() > 0.0 => x / delta,
        _ => return Err(ambiguous(z)),
    };
    let v = x.powu(n);
    let m = Mobius::new(
        Complex::new(1.0, 0.0),
        Complex::new(-abs_a, 0.0),
        Complex::new(abs_a, 0.0),
        Complex::new(-1.0, 0.0),
    )
    .expect("|A| < 1")
    .apply_c(v);
    if m.norm() < 1e-12 || m.recip().norm() < 1e-12 {
        return Err(ambiguous(z));
    }
    let p = principal_root(ExtComplex::Finite(v), n)
        .finite()
        .expect("finite root");
    let k = ((x / p).arg() * n as f64 / std::f64::consts::TAU).round() as i64;
    let root = principal_root(m, n).finite().expect("finite root");
    Ok(ExtComplex::from(
        delta * root * root_of_unity(k + j as i64, n),
    ))
}

/// A finite group of covering transformations with its composition table.
#[derive(Debug, Clone)]
pub struct CoverGroup {
    pub family: String,
    pub generators: Vec<(String, DeckMap)>,
    /// All elements; each named after its generator or as a product `g*h`.
    pub elements: Vec<(String, DeckMap)>,
    /// `table[i][j]` is the index of `elements[i] o elements[j]`.
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
}

impl CoverGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn inverse(&self, i: usize) -> Option<usize> {
        (0..self.order())
            .find(|&j| self.table[i][j] == self.identity && self.table[j][i] == self.identity)
    }

    pub fn element(&self, name: &str) -> Option<&DeckMap> {
        self.elements
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, m)| m)
    }

    /// Closure of `generators` under composition, identified pointwise.
    pub fn close(
        family: &str,
        generators: Vec<(String, DeckMap)>,
        max_order: usize,
    ) -> Result<CoverGroup> {
        let pts = sphere_points(SAMPLE_POINTS, SAMPLE_SEED);
        let eval = |m: &DeckMap| -> Vec<Option<ExtComplex>> {
            pts.iter().map(|z| m.apply(*z).ok()).collect()
        };
        let same = |x: &[Option<ExtComplex>], y: &[Option<ExtComplex>]| {
            let mut compared = 0;
            for (a, b) in x.iter().zip(y) {
                if let (Some(a), Some(b)) = (a, b) {
                    if a.chordal(b) > MAP_TOL {
                        return false;
                    }
                    compared += 1;
                }
            }
            compared * 4 >= 3 * x.len()
        };
        let mut elements: Vec<(String, DeckMap)> = Vec::new();
        let mut values: Vec<Vec<Option<ExtComplex>>> = Vec::new();
        let id_vals: Vec<Option<ExtComplex>> = pts.iter().map(|z| Some(*z)).collect();
        for (name, g) in &generators {
            let v = eval(g);
            if !values.iter().any(|w| same(w, &v)) {
                elements.push((name.clone(), g.clone()));
                values.push(v);
            }
        }
        let mut products: HashMap<(usize, usize), usize> = HashMap::new();
        let mut i = 0;
        while i < elements.len() {
            for j in 0..=i {
                for (row, col) in [(i, j), (j, i)] {
                    if products.contains_key(&(row, col)) {
                        continue;
                    }
                    let f = elements[row].1.clone();
                    let v: Vec<Option<ExtComplex>> = values[col]
                        .iter()
                        .map(|z| z.and_then(|z| f.apply(z).ok()))
                        .collect();
                    let idx = match values.iter().position(|w| same(w, &v)) {
                        Some(k) => k,
                        None => {
                            if elements.len() >= max_order {
                                return Err(Error::GuardExceeded(format!(
                                    "group closure exceeds order {max_order}"
                                )));
                            }
                            let name = format!("{}*{}", elements[row].0, elements[col].0);
                            elements
                                .push((name, DeckMap::Composite(vec![f, elements[col].1.clone()])));
                            values.push(v);
                            elements.len() - 1
                        }
                    };
                    products.insert((row, col), idx);
                }
            }
            i += 1;
        }
        let n = elements.len();
        let table: Vec<Vec<usize>> = (0..n)
            .map(|r| (0..n).map(|c| products[&(r, c)]).collect())
            .collect();
        let identity = values
            .iter()
            .position(|v| same(v, &id_vals))
            .ok_or_else(|| Error::Degenerate("closure has no identity".into()))?;
        Ok(CoverGroup {
            family: family.into(),
            generators,
            elements,
            table,
            identity,
        })
    }
}

/// `T_k = b^{-1} o (w_k .) o b` for the factor `b` at `a`.
pub fn single_power_map(a: Complex, n: u32, k: u32) -> Result<Mobius> {
    let b = Mobius::blaschke_factor(a)?;
    Ok(b.inverse()
        .compose(&Mobius::scaling(root_of_unity(k as i64, n))?)
        .compose(&b))
}

pub fn group_single_power(a: Complex, n: u32) -> Result<CoverGroup> {
    BlaschkeProduct::build(&FamilySpec::SinglePower { a, n })?;
    let gens = (0..n)
        .map(|k| Ok((format!("T{k}"), DeckMap::Mobius(single_power_map(a, n, k)?))))
        .collect::<Result<Vec<_>>>()?;
    CoverGroup::close("single_power", gens, n as usize)
}

pub fn group_two_zeros(a1: Complex, a2: Complex, n: u32) -> Result<CoverGroup> {
    BlaschkeProduct::build(&FamilySpec::TwoZeros { a1, a2, n })?;
    let mut gens: Vec<(String, DeckMap)> = (0..n)
        .map(|k| {
            (
                format!("S{k}"),
                DeckMap::TwoZeroBranch {
                    a1,
                    a2,
                    n,
                    k,
                    flip: false,
                },
            )
        })
        .collect();
    gens.push(("U".into(), DeckMap::Mobius(two_zero_involution(a1, a2))));
    CoverGroup::close("two_zeros", gens, 4 * n as usize)
}

pub fn group_rotational(r: f64, alpha: f64, n: u32) -> Result<CoverGroup> {
    BlaschkeProduct::build(&FamilySpec::Rotational { r, alpha, n })?;
    let gens = (0..n)
        .map(|k| {
            Ok((
                format!("T{k}"),
                DeckMap::Mobius(Mobius::scaling(root_of_unity(k as i64, n))?),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    CoverGroup::close("rotational", gens, n as usize)
}

fn ring_group(delta: Complex, abs_a: f64, n: u32) -> Result<CoverGroup> {
    let mut gens = (0..n)
        .map(|k| {
            Ok((
                format!("T{k}"),
                DeckMap::Mobius(Mobius::scaling(root_of_unity(k as i64, n))?),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    gens.extend((0..n).map(|j| (format!("S{j}"), DeckMap::RingBranch { delta, abs_a, n, j })));
    CoverGroup::close("two_rings", gens, 4 * n as usize)
}

/// Branch data `(delta, |A|)` for aligned rings: `A = e^{i n alpha} q/(1 + s)`, `delta = e^{i alpha}`.
pub fn aligned_ring_branch_data(r1: f64, r2: f64, alpha: f64, n: u32) -> (Complex, f64) {
    let (q, s) = (
        r1.powi(n as i32) + r2.powi(n as i32),
        (r1 * r2).powi(n as i32),
    );
    (cis(alpha), q / (1.0 + s))
}

/// Branch data for general rings: `delta` is the `n`-th root of `A/|A|`
/// closest to `e^{i(alpha1 + alpha2)/2}`.
pub fn ring_branch_data(r1: f64, alpha1: f64, r2: f64, alpha2: f64, n: u32) -> (Complex, f64) {
    let a = two_rings_coefficient(r1, alpha1, r2, alpha2, n);
    let base = cis(a.arg() / n as f64);
    let target = cis(0.5 * (alpha1 + alpha2));
    let delta = (0..n)
        .map(|k| base * root_of_unity(k as i64, n))
        .min_by(|x, y| (x - target).norm().total_cmp(&(y - target).norm()))
        .unwrap_or(base);
    (delta, a.norm())
}

pub fn group_two_rings_aligned(r1: f64, r2: f64, alpha: f64, n: u32) -> Result<CoverGroup> {
    BlaschkeProduct::build(&FamilySpec::TwoRings {
        r1,
        alpha1: alpha,
        r2,
        alpha2: alpha,
        n,
    })?;
    let (delta, abs_a) = aligned_ring_branch_data(r1, r2, alpha, n);
    ring_group(delta, abs_a, n)
}

pub fn group_two_rings_general(
    r1: f64,
    alpha1: f64,
    r2: f64,
    alpha2: f64,
    n: u32,
) -> Result<CoverGroup> {
    BlaschkeProduct::build(&FamilySpec::TwoRings {
        r1,
        alpha1,
        r2,
        alpha2,
        n,
    })?;
    let (delta, abs_a) = ring_branch_data(r1, alpha1, r2, alpha2, n);
    if abs_a < 1e-14 {
        return Err(Error::Degenerate(
            "A = 0: the branch function is a rotation".into(),
        ));
    }
    ring_group(delta, abs_a, n)
}

/// Pinned values `S_j(0) = delta |A|^{1/n} w_j` and `S_j(inf) = delta |A|^{-1/n} w_j`.
pub fn ring_branch_pinned(delta: Complex, abs_a: f64, n: u32, j: u32) -> (Complex, Complex) {
    let w = delta * root_of_unity(j as i64, n);
    (
        w * abs_a.powf(1.0 / n as f64),
        w * abs_a.powf(-1.0 / n as f64),
    )
}

/// Group of the family of `b`.
pub fn cover_group(b: &BlaschkeProduct) -> Result<CoverGroup> {
    match *b.spec() {
        FamilySpec::SinglePower { a, n } => group_single_power(a, n),
        FamilySpec::TwoZeros { a1, a2, n } => group_two_zeros(a1, a2, n),
        FamilySpec::Rotational { r, alpha, n } => group_rotational(r, alpha, n),
        FamilySpec::TwoRings {
            r1,
            alpha1,
            r2,
            alpha2,
            n,
        } => group_two_rings_general(r1, alpha1, r2, alpha2, n),
        _ => Err(Error::RejectParam(
            "no closed-form covering group for this family".into(),
        )),
    }
}

/// Largest chordal `|B(g(z)) - B(z)|` over the sample points where `g` is defined.
pub fn deck_defect(b: &BlaschkeProduct, g: &DeckMap, points: &[ExtComplex]) -> f64 {
    points
        .iter()
        .filter_map(|z| {
            g.apply(*z)
                .ok()
                .map(|gz| b.evaluate(gz).chordal(&b.evaluate(*z)))
        })
        .fold(0.0, f64::max)
}
