//! Sampled curves on the sphere.

use crate::complex_plane::ExtComplex;

/// One sample of a parametrized curve and its image under the product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub t: f64,
    pub z: ExtComplex,
    pub w: ExtComplex,
    /// Sample lies on a detour around a critical value.
    pub detour: bool,
}

/// A sampled curve with its family tag, branch index and endpoint labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamCurve {
    pub family: String,
    pub branch: usize,
    pub samples: Vec<CurveSample>,
    pub start_label: String,
    pub end_label: String,
    pub closed: bool,
}

impl ParamCurve {
    pub fn points(&self) -> impl Iterator<Item = ExtComplex> + '_ {
        self.samples.iter().map(|s| s.z)
    }

    /// Points off detours.
    pub fn regular_points(&self) -> impl Iterator<Item = ExtComplex> + '_ {
        self.samples.iter().filter(|s| !s.detour).map(|s| s.z)
    }
}

/// Symmetric Hausdorff distance between two point sets in the chordal metric.
pub fn hausdorff(a: &[ExtComplex], b: &[ExtComplex]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() {
            0.0
        } else {
            f64::INFINITY
        };
    }
    let one = |x: &ExtComplex, s: &[ExtComplex]| {
        s.iter().map(|y| x.chordal(y)).fold(f64::INFINITY, f64::min)
    };
    a.iter()
        .map(|x| one(x, b))
        .chain(b.iter().map(|y| one(y, a)))
        .fold(0.0, f64::max)
}

/// Largest distance from a point of `a` to the set `b` (one-sided).
pub fn directed_distance(a: &[ExtComplex], b: &[ExtComplex]) -> f64 {
    a.iter()
        .map(|x| b.iter().map(|y| x.chordal(y)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Distance of multisets of equal size: best greedy pairing, chordal.
pub fn multiset_distance(a: &[ExtComplex], b: &[ExtComplex]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push((x.chordal(y), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut done = vec![false; a.len()];
    let mut worst: f64 = 0.0;
    for (d, i, j) in pairs {
        if !done[i] && !used[j] {
            done[i] = true;
            used[j] = true;
            worst = worst.max(d);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex_plane::{Complex, INF};

    #[test]
    fn distances() {
        let a = vec![ExtComplex::Finite(Complex::new(0.0, 0.0)), INF];
        let b = vec![INF, ExtComplex::Finite(Complex::new(0.0, 0.0))];
        assert_eq!(hausdorff(&a, &b), 0.0);
        assert_eq!(multiset_distance(&a, &b), 0.0);
        let c = vec![INF, INF];
        assert_eq!(hausdorff(&c, &b), 2.0);
        assert_eq!(directed_distance(&c, &b), 0.0);
        assert_eq!(multiset_distance(&c, &b), 2.0);
    }
}
