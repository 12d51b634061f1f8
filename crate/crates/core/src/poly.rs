//! Sparse multivariate polynomials in up to three variables.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Exponent vector; unused trailing components stay zero.
pub type Exps = [u8; 3];

pub fn exps_degree(e: &Exps) -> usize {
    e.iter().map(|&v| v as usize).sum()
}

/// All exponent vectors in `dim` variables with total degree exactly `deg`,
/// in graded reverse-lexicographic order.
pub fn multi_indices(dim: usize, deg: usize) -> Vec<Exps> {
    let mut out = Vec::new();
    match dim {
        1 => out.push([deg as u8, 0, 0]),
        2 => {
            for a in (0..=deg).rev() {
                out.push([a as u8, (deg - a) as u8, 0]);
            }
        }
        3 => {
            for a in (0..=deg).rev() {
                for b in (0..=deg - a).rev() {
                    out.push([a as u8, b as u8, (deg - a - b) as u8]);
                }
            }
        }
        _ => panic!("dimension {dim} not supported"),
    }
    out
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// β! = Π β_i!
pub fn multi_factorial(e: &Exps) -> f64 {
    e.iter().map(|&v| factorial(v as usize)).product()
}

/// x^β for the first `dim` components of `x`.
pub fn monomial(e: &Exps, x: &[f64]) -> f64 {
    let mut v = 1.0;
    for (i, &p) in e.iter().enumerate() {
        if p > 0 {
            v *= x[i].powi(p as i32);
        }
    }
    v
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    dim: usize,
    terms: BTreeMap<Exps, f64>,
}

impl Poly {
    pub fn zero(dim: usize) -> Self {
        assert!((1..=3).contains(&dim), "dimension {dim} not supported");
        Poly { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::monomial(dim, [0, 0, 0], c)
    }

    pub fn monomial(dim: usize, e: Exps, c: f64) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(e, c);
        p
    }

    /// The coordinate function x_i.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        let mut e = [0u8; 3];
        e[i] = 1;
        Self::monomial(dim, e, 1.0)
    }

    pub fn from_terms<I: IntoIterator<Item = (Exps, f64)>>(dim: usize, it: I) -> Self {
        let mut p = Self::zero(dim);
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, e: Exps, c: f64) {
        debug_assert!(e[self.dim..].iter().all(|&v| v == 0));
        if c == 0.0 {
            return;
        }
        let slot = self.terms.entry(e).or_insert(0.0);
        *slot += c;
        if *slot == 0.0 {
            self.terms.remove(&e);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &f64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Exps) -> f64 {
        self.terms.get(e).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(exps_degree).max().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(e, c)| c * monomial(e, x)).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_terms(self.dim, self.terms.iter().map(|(e, c)| (*e, c * s)))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut p = self.clone();
        for (e, c) in &other.terms {
            p.add_term(*e, *c);
        }
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut p = Self::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                p.add_term(e, ca * cb);
            }
        }
        p
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut p = Self::constant(self.dim, 1.0);
        for _ in 0..n {
            p = p.mul(self);
        }
        p
    }

    /// Terms of total degree exactly `deg`.
    pub fn homogeneous_part(&self, deg: usize) -> Self {
        Self::from_terms(
            self.dim,
            self.terms.iter().filter(|(e, _)| exps_degree(e) == deg).map(|(e, c)| (*e, *c)),
        )
    }

    /// Terms of total degree at most `deg`.
    pub fn truncate(&self, deg: usize) -> Self {
        Self::from_terms(
            self.dim,
            self.terms.iter().filter(|(e, _)| exps_degree(e) <= deg).map(|(e, c)| (*e, *c)),
        )
    }

    pub fn derivative(&self, axis: usize) -> Self {
        let mut p = Self::zero(self.dim);
        for (e, c) in &self.terms {
            if e[axis] > 0 {
                let mut f = *e;
                f[axis] -= 1;
                p.add_term(f, c * e[axis] as f64);
            }
        }
        p
    }

    /// y ↦ p(x0 + y), expanded in y.
    pub fn shift(&self, x0: &[f64]) -> Self {
        let lin: Vec<Poly> = (0..self.dim)
            .map(|i| Self::constant(self.dim, x0[i]).add(&Self::coordinate(self.dim, i)))
            .collect();
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            let mut t = Self::constant(self.dim, *c);
            for i in 0..self.dim {
                if e[i] > 0 {
                    t = t.mul(&lin[i].pow(e[i] as usize));
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// y ↦ p(s·y).
    pub fn dilate(&self, s: f64) -> Self {
        Self::from_terms(
            self.dim,
            self.terms.iter().map(|(e, c)| (*e, c * s.powi(exps_degree(e) as i32))),
        )
    }

    /// Composition p(L(λ)) with each x_i replaced by the polynomial `subs[i]`.
    pub fn compose(&self, subs: &[Poly]) -> Self {
        let dim = subs[0].dim;
        let mut out = Self::zero(dim);
        for (e, c) in &self.terms {
            let mut t = Self::constant(dim, *c);
            for i in 0..self.dim {
                if e[i] > 0 {
                    t = t.mul(&subs[i].pow(e[i] as usize));
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Laplacian.
    pub fn laplacian(&self) -> Self {
        let mut p = Self::zero(self.dim);
        for i in 0..self.dim {
            p = p.add(&self.derivative(i).derivative(i));
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multi_index_counts() {
        assert_eq!(multi_indices(2, 3).len(), 4);
        assert_eq!(multi_indices(3, 2).len(), 6);
        assert_eq!(multi_indices(3, 0), vec![[0, 0, 0]]);
    }

    #[test]
    fn shift_matches_eval() {
        let p = Poly::from_terms(2, [([2, 1, 0], 3.0), ([0, 0, 0], -1.0), ([1, 0, 0], 0.5)]);
        let x0 = [0.3, -0.7];
        let q = p.shift(&x0);
        let y = [0.11, 0.42];
        let direct = p.eval(&[x0[0] + y[0], x0[1] + y[1]]);
        assert!((q.eval(&y) - direct).abs() < 1e-14);
    }

    #[test]
    fn derivative_and_laplacian() {
        let p = Poly::from_terms(3, [([2, 0, 0], 1.0), ([0, 2, 0], 1.0), ([0, 0, 2], -2.0)]);
        assert!(p.laplacian().is_zero());
        assert_eq!(p.derivative(0).coeff(&[1, 0, 0]), 2.0);
    }
}
