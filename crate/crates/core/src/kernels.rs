//! Fundamental solutions and their far-field multipole terms.
//!
//! Every far-field term is a finite sum of `c · x^γ · |x|^p · (ln|x|)^q`
//! with q ∈ {0, 1}. Derivatives act symbolically on that representation:
//!
//! ∂_i(x^γ r^p L^q) = γ_i x^{γ-e_i} r^p L^q + p x^{γ+e_i} r^{p-2} L^q + q x^{γ+e_i} r^{p-2} L^{q-1}

use crate::moments::{DataJet, MomentTable};
use crate::poly::{exps_degree, multi_factorial, multi_indices, monomial, Exps, Poly};
use crate::{Dim, Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Highest Taylor order of the kernels supported by the term tables.
pub const MAX_TAYLOR_ORDER: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Kernel {
    /// E with -ΔE = δ
    Laplace,
    /// φ with -Δφ = E
    Biharmonic,
}

pub fn laplace_fundamental(x: &[f64], dim: Dim) -> Result<f64> {
    let r = norm(x, dim);
    if r == 0.0 {
        return Err(Error::SingularPoint);
    }
    Ok(laplace_radial(r, dim))
}

pub fn biharmonic_fundamental(x: &[f64], dim: Dim) -> Result<f64> {
    let r = norm(x, dim);
    if r == 0.0 && dim == Dim::Two {
        return Err(Error::SingularPoint);
    }
    Ok(biharmonic_radial(r, dim))
}

/// E as a function of r = |x|.
#[inline]
pub fn laplace_radial(r: f64, dim: Dim) -> f64 {
    match dim {
        Dim::Two => -r.ln() / (2.0 * PI),
        Dim::Three => 1.0 / (4.0 * PI * r),
    }
}

/// φ as a function of r = |x|; in 2D the value at r = 0 is the limit 0.
#[inline]
pub fn biharmonic_radial(r: f64, dim: Dim) -> f64 {
    match dim {
        Dim::Two => {
            if r == 0.0 {
                0.0
            } else {
                r * r * (r.ln() - 1.0) / (8.0 * PI)
            }
        }
        Dim::Three => -r / (8.0 * PI),
    }
}

pub(crate) fn norm(x: &[f64], dim: Dim) -> f64 {
    x[..dim.n()].iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Key of a basis function x^γ |x|^p (ln|x|)^q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TermKey {
    pub mono: Exps,
    pub rpow: i32,
    pub log: u8,
}

/// Finite linear combination of basis functions x^γ |x|^p (ln|x|)^q.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadialExpr {
    pub dim: Dim,
    terms: BTreeMap<TermKey, f64>,
}

impl RadialExpr {
    pub fn zero(dim: Dim) -> Self {
        RadialExpr { dim, terms: BTreeMap::new() }
    }

    pub fn term(dim: Dim, mono: Exps, rpow: i32, log: u8, c: f64) -> Self {
        let mut e = Self::zero(dim);
        e.add_term(TermKey { mono, rpow, log }, c);
        e
    }

    pub fn add_term(&mut self, k: TermKey, c: f64) {
        if c == 0.0 {
            return;
        }
        let slot = self.terms.entry(k).or_insert(0.0);
        *slot += c;
        if *slot == 0.0 {
            self.terms.remove(&k);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &f64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_scaled(&mut self, other: &Self, s: f64) {
        for (k, c) in &other.terms {
            self.add_term(*k, c * s);
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut e = Self::zero(self.dim);
        e.add_scaled(self, s);
        e
    }

    pub fn has_log(&self) -> bool {
        self.terms.keys().any(|k| k.log > 0)
    }

    /// Homogeneity degree |γ| + p, if all terms share it.
    pub fn degree(&self) -> Option<i32> {
        let mut it = self.terms.keys().map(|k| exps_degree(&k.mono) as i32 + k.rpow);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// Terms carrying ln|x|, with the logarithm removed.
    pub fn log_companion(&self) -> Self {
        let mut e = Self::zero(self.dim);
        for (k, c) in &self.terms {
            if k.log > 0 {
                e.add_term(TermKey { log: k.log - 1, ..*k }, *c);
            }
        }
        e
    }

    /// Terms without ln|x|.
    pub fn log_free(&self) -> Self {
        let mut e = Self::zero(self.dim);
        for (k, c) in &self.terms {
            if k.log == 0 {
                e.add_term(*k, *c);
            }
        }
        e
    }

    pub fn partial(&self, axis: usize) -> Self {
        let mut e = Self::zero(self.dim);
        for (k, c) in &self.terms {
            if k.mono[axis] > 0 {
                let mut m = k.mono;
                m[axis] -= 1;
                e.add_term(TermKey { mono: m, ..*k }, c * k.mono[axis] as f64);
            }
            let mut up = k.mono;
            up[axis] += 1;
            if k.rpow != 0 {
                e.add_term(TermKey { mono: up, rpow: k.rpow - 2, log: k.log }, c * k.rpow as f64);
            }
            if k.log > 0 {
                e.add_term(TermKey { mono: up, rpow: k.rpow - 2, log: k.log - 1 }, c * k.log as f64);
            }
        }
        e
    }

    pub fn derivative(&self, beta: &Exps) -> Self {
        let mut e = self.clone();
        for axis in 0..self.dim.n() {
            for _ in 0..beta[axis] {
                e = e.partial(axis);
            }
        }
        e
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        if self.terms.is_empty() {
            return 0.0;
        }
        let r2: f64 = x[..self.dim.n()].iter().map(|v| v * v).sum();
        let r = r2.sqrt();
        let lr = r.ln();
        let mut s = 0.0;
        for (k, c) in &self.terms {
            let mut v = c * monomial(&k.mono, x);
            if k.rpow != 0 {
                v *= r.powi(k.rpow);
            }
            if k.log > 0 {
                v *= lr.powi(k.log as i32);
            }
            s += v;
        }
        s
    }

    pub fn gradient(&self) -> Vec<RadialExpr> {
        (0..self.dim.n()).map(|i| self.partial(i)).collect()
    }

    /// Drop coefficients below `tol` in absolute value.
    pub fn prune(&mut self, tol: f64) {
        self.terms.retain(|_, c| c.abs() > tol);
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }
}

pub fn kernel_expr(kernel: Kernel, dim: Dim) -> RadialExpr {
    let z = [0, 0, 0];
    match (kernel, dim) {
        (Kernel::Laplace, Dim::Two) => RadialExpr::term(dim, z, 0, 1, -1.0 / (2.0 * PI)),
        (Kernel::Laplace, Dim::Three) => RadialExpr::term(dim, z, -1, 0, 1.0 / (4.0 * PI)),
        (Kernel::Biharmonic, Dim::Two) => {
            let mut e = RadialExpr::term(dim, z, 2, 1, 1.0 / (8.0 * PI));
            e.add_term(TermKey { mono: z, rpow: 2, log: 0 }, -1.0 / (8.0 * PI));
            e
        }
        (Kernel::Biharmonic, Dim::Three) => RadialExpr::term(dim, z, 1, 0, -1.0 / (8.0 * PI)),
    }
}

/// Σ_{|β|=ℓ} (-1)^ℓ/β! · w(β) · ∂^βK, the ℓ-th Taylor term of K(x - ty) in t
/// with y^β replaced by the weights w(β).
pub fn taylor_contraction<W>(kernel: Kernel, dim: Dim, order: usize, mut weight: W) -> Result<RadialExpr>
where
    W: FnMut(&Exps) -> Result<f64>,
{
    if order > MAX_TAYLOR_ORDER {
        return Err(Error::OrderTooHigh { order, max: MAX_TAYLOR_ORDER });
    }
    let base = kernel_expr(kernel, dim);
    let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut out = RadialExpr::zero(dim);
    for beta in multi_indices(dim.n(), order) {
        let w = weight(&beta)?;
        if w == 0.0 {
            continue;
        }
        out.add_scaled(&base.derivative(&beta), sign * w / multi_factorial(&beta));
    }
    Ok(out)
}

/// (1/ℓ!) ∂_t^ℓ K(x - ty) at t = 0, evaluated symbolically.
pub fn kernel_taylor_term(kernel: Kernel, order: usize, x: &[f64], y: &[f64], dim: Dim) -> Result<f64> {
    if norm(x, dim) == 0.0 {
        return Err(Error::SingularPoint);
    }
    let expr = taylor_contraction(kernel, dim, order, |b| Ok(monomial(b, y)))?;
    Ok(expr.eval(x))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TermLabel {
    R,
    S,
    A,
    B,
}

/// One far-field term as a function of x (relative to the inclusion centre).
#[derive(Clone, Debug, Serialize)]
pub struct MultipoleTerm {
    pub label: TermLabel,
    /// ℓ for R_ℓ and S_ℓ; the subscript for A and B.
    pub index: i32,
    /// Source order k.
    pub k: usize,
    pub expr: RadialExpr,
}

impl MultipoleTerm {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.expr.eval(x)
    }

    pub fn is_zero(&self) -> bool {
        self.expr.is_zero()
    }

    pub fn has_log(&self) -> bool {
        self.expr.has_log()
    }

    /// Homogeneity degree; for a log term c(x) ln|x| this is the degree of c.
    pub fn degree(&self) -> Option<i32> {
        self.expr.degree()
    }

    /// The coefficient function of ln|x|.
    pub fn companion(&self) -> RadialExpr {
        self.expr.log_companion()
    }

    pub fn name(&self) -> String {
        format!("{:?}{}^({})", self.label, self.index, self.k)
    }
}

/// Builds far-field terms from the moment table and data jet.
#[derive(Clone, Debug)]
pub struct FarField<'a> {
    pub dim: Dim,
    pub moments: &'a MomentTable,
    pub jet: &'a DataJet,
    pub alpha1: f64,
}

impl<'a> FarField<'a> {
    pub fn new(moments: &'a MomentTable, jet: &'a DataJet, alpha1: f64) -> Self {
        FarField { dim: moments.dim, moments, jet, alpha1 }
    }

    /// ∫_ω y^β F^(k)(y) dy.
    fn density_moment(&self, density: &Poly, beta: &Exps) -> Result<f64> {
        let mono = Poly::monomial(self.dim.n(), *beta, 1.0);
        self.moments.weighted_moment(&mono.mul(density))
    }

    fn contraction(&self, kernel: Kernel, k: usize, order: usize, prefactor: f64) -> Result<RadialExpr> {
        let density = self.jet.f_polynomial(k);
        if density.is_zero() || prefactor == 0.0 {
            if order > MAX_TAYLOR_ORDER {
                return Err(Error::OrderTooHigh { order, max: MAX_TAYLOR_ORDER });
            }
            return Ok(RadialExpr::zero(self.dim));
        }
        let e = taylor_contraction(kernel, self.dim, order, |b| self.density_moment(&density, b))?;
        Ok(e.scale(prefactor))
    }

    /// R_ℓ^(k): the (ℓ-1)-th Taylor term of the Newton potential U^(k).
    pub fn r(&self, k: usize, l: usize) -> Result<MultipoleTerm> {
        assert!(l >= 1);
        let expr = self.contraction(Kernel::Laplace, k, l - 1, 1.0)?;
        Ok(MultipoleTerm { label: TermLabel::R, index: l as i32, k, expr })
    }

    /// S_ℓ^(k): the (ℓ+2)-th Taylor term of P^(k) = -α1 ∫ φ(x-y) F^(k)(y) dy.
    pub fn s(&self, k: usize, l: usize) -> Result<MultipoleTerm> {
        let expr = self.contraction(Kernel::Biharmonic, k, l + 2, -self.alpha1)?;
        Ok(MultipoleTerm { label: TermLabel::S, index: l as i32, k, expr })
    }

    /// Leading Taylor terms (orders 0..2) of P^(k): for d=2 split into the
    /// ln|x| parts A2, A1, A0 (stored as A(x)·ln|x|) and the remainders B2, B1,
    /// B0; for d=3 the terms A1, A0, A-1.
    pub fn leading_ab(&self, k: usize) -> Result<Vec<MultipoleTerm>> {
        let mut out = Vec::new();
        for order in 0..=2usize {
            let e = self.contraction(Kernel::Biharmonic, k, order, -self.alpha1)?;
            match self.dim {
                Dim::Two => {
                    let idx = 2 - order as i32;
                    let mut a = RadialExpr::zero(self.dim);
                    for (key, c) in e.log_companion().terms() {
                        a.add_term(TermKey { log: 1, ..*key }, *c);
                    }
                    out.push(MultipoleTerm { label: TermLabel::A, index: idx, k, expr: a });
                    out.push(MultipoleTerm { label: TermLabel::B, index: idx, k, expr: e.log_free() });
                }
                Dim::Three => {
                    out.push(MultipoleTerm { label: TermLabel::A, index: 1 - order as i32, k, expr: e });
                }
            }
        }
        if self.dim == Dim::Two {
            // order: A2, A1, A0, B2, B1, B0
            let (a, b): (Vec<_>, Vec<_>) = out.into_iter().partition(|t| t.label == TermLabel::A);
            out = a.into_iter().chain(b).collect();
        }
        Ok(out)
    }

    /// b^(k) = -(1/2π) ∫_ω F^(k) dy.
    pub fn b(&self, k: usize) -> Result<f64> {
        let density = self.jet.f_polynomial(k);
        if density.is_zero() {
            return Ok(0.0);
        }
        Ok(-self.moments.weighted_moment(&density)? / (2.0 * PI))
    }
}

/// The logarithmic constants of the d=2 expansion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogConstant {
    pub k: usize,
    pub b: f64,
    /// c^(k) = -α2 b^(k) (H1 cost).
    pub c: f64,
}

impl LogConstant {
    pub fn new(k: usize, b: f64, alpha2: f64) -> Self {
        LogConstant { k, b, c: -alpha2 * b }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fundamental_values() {
        assert_eq!(laplace_fundamental(&[1.0, 0.0], Dim::Two).unwrap(), 0.0);
        assert!((laplace_fundamental(&[0.0, 0.0, 1.0], Dim::Three).unwrap() - 0.0795774715459477).abs() < 1e-15);
        let e = std::f64::consts::E;
        assert!((laplace_fundamental(&[e, 0.0], Dim::Two).unwrap() + 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!(laplace_fundamental(&[0.0, 0.0], Dim::Two).is_err());
        assert!((biharmonic_fundamental(&[0.0, 1.0], Dim::Two).unwrap() + 1.0 / (8.0 * PI)).abs() < 1e-15);
        assert!((biharmonic_fundamental(&[2.0, 0.0, 0.0], Dim::Three).unwrap() + 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert_eq!(biharmonic_fundamental(&[0.0; 3], Dim::Three).unwrap(), 0.0);
        assert!(biharmonic_fundamental(&[0.0; 2], Dim::Two).is_err());
    }

    #[test]
    fn expression_matches_radial_kernels() {
        let x = [0.3, -1.7, 0.4];
        for dim in [Dim::Two, Dim::Three] {
            let r = norm(&x, dim);
            assert!((kernel_expr(Kernel::Laplace, dim).eval(&x) - laplace_radial(r, dim)).abs() < 1e-15);
            assert!((kernel_expr(Kernel::Biharmonic, dim).eval(&x) - biharmonic_radial(r, dim)).abs() < 1e-15);
        }
    }

    #[test]
    fn order_limit() {
        assert!(matches!(
            kernel_taylor_term(Kernel::Laplace, 7, &[1.0, 1.0], &[0.1, 0.1], Dim::Two),
            Err(Error::OrderTooHigh { .. })
        ));
    }
}
