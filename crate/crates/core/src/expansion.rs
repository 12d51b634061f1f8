//! Assembly of the coefficients d^k J and their scale functions ℓ_k.
//!
//! Each theorem sum is first written as a list of [`Term`]s (pure index
//! bookkeeping), then every term is evaluated from the baseline fields. The
//! ledger keeps the per-term breakdown so a wrong coefficient points at a
//! single term.

use crate::fields::{jet_at, PointJet, ScalarField};
use crate::kernels::{FarField, LogConstant};
use crate::moments::{DataJet, MomentTable};
use crate::poly::Poly;
use crate::potentials::{integrate_over_shape, Potential};
use crate::problem::Problem;
use crate::solver::{CorrectorSet, Family, FieldId, Solver};
use crate::{config, CostKind, Dim, Error, Result};
use serde::Serialize;
use std::cell::RefCell;
use std::collections::BTreeMap;

/// ℓ(ε) = ε^a (ln ε)^log |ω|; the factor ε^d of |ω_ε| is part of `a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScaleFunction {
    pub a: i32,
    pub log: u8,
    pub measure: f64,
}

impl ScaleFunction {
    pub fn eval(&self, eps: f64) -> f64 {
        eps.powi(self.a) * eps.ln().powi(self.log as i32) * self.measure
    }

    pub fn label(&self) -> String {
        let l = if self.log == 1 { " ln eps" } else { "" };
        format!("eps^{}{} |omega|", self.a, l)
    }
}

/// ℓ_k for the given dimension (the same ladder serves both costs).
pub fn ladder(dim: Dim, k: usize, measure: f64) -> ScaleFunction {
    assert!(k >= 1);
    match dim {
        Dim::Two if k == 1 => ScaleFunction { a: 2, log: 0, measure },
        Dim::Two => ScaleFunction { a: (k / 2) as i32 + 2, log: k.is_multiple_of(2) as u8, measure },
        Dim::Three => ScaleFunction { a: k as i32 + 2, log: 0, measure },
    }
}

/// One summand of a coefficient formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Term {
    /// (1/|ω|)∫_ω ∇^j((f2-f1)p0)(x0)[y]^j/j! dy
    P0Jet { j: usize },
    /// the same with a corrector in place of p0
    CorrJet { id: FieldId, j: usize },
    /// (1/|ω|)∫_ω a_j P^(k) dy
    PotInt { k: usize, j: usize },
    /// c^(k)·(1/|ω|)∫_ω a_j dy
    LogConst { k: usize, j: usize },
}

impl Term {
    pub fn label(&self) -> String {
        match self {
            Term::P0Jet { j } => format!("jet[(f2-f1)p0, j={j}]"),
            Term::CorrJet { id, j } => format!("jet[(f2-f1){id}, j={j}]"),
            Term::PotInt { k, j } => format!("int[a_{j} P^({k})]"),
            Term::LogConst { k, j } => format!("c^({k}) mean[a_{j}]"),
        }
    }
}

fn corr(family: Family, k: usize, j: usize) -> Term {
    Term::CorrJet { id: FieldId { family, k }, j }
}

/// Σ_{j=0}^{hi} f(j), empty when hi < 0.
fn sum_to(out: &mut Vec<Term>, hi: isize, f: impl Fn(usize) -> Term) {
    if hi >= 0 {
        out.extend((0..=hi as usize).map(f));
    }
}

/// The summands of d^k for the given cost and dimension.
pub fn formula(dim: Dim, cost: CostKind, k: usize) -> Vec<Term> {
    assert!(k >= 1);
    let mut t = Vec::new();
    match (cost, dim) {
        (CostKind::H1, Dim::Two) => {
            let n = (k / 2) as isize;
            if k == 1 {
                t.push(Term::P0Jet { j: 0 });
            } else if k.is_multiple_of(2) {
                sum_to(&mut t, n - 2, |j| Term::LogConst { k: n as usize - j, j });
            } else {
                t.push(Term::P0Jet { j: n as usize });
                sum_to(&mut t, n - 2, |j| Term::PotInt { k: n as usize - j, j });
                sum_to(&mut t, n - 2, |j| corr(Family::WH1, n as usize - j, j));
            }
        }
        (CostKind::H1, Dim::Three) => {
            let n = k as isize - 1;
            t.push(Term::P0Jet { j: n as usize });
            sum_to(&mut t, n - 2, |j| Term::PotInt { k: n as usize - j, j });
            sum_to(&mut t, n - 3, |j| corr(Family::WH1, n as usize - 1 - j, j));
        }
        (CostKind::L2, Dim::Two) => {
            let n = (k / 2) as isize;
            let nu = n as usize;
            if k == 1 {
                t.push(Term::P0Jet { j: 0 });
            } else if k.is_multiple_of(2) {
                sum_to(&mut t, n - 2, |j| corr(Family::S(2), nu - j, j));
                sum_to(&mut t, n - 3, |j| corr(Family::S(4), nu - 1 - j, j));
                sum_to(&mut t, n - 4, |j| corr(Family::S(6), nu - 2 - j, j));
                sum_to(&mut t, n - 2, |j| corr(Family::N, nu - j, j));
            } else {
                t.push(Term::P0Jet { j: nu });
                sum_to(&mut t, n - 4, |j| Term::PotInt { k: nu - 2 - j, j });
                sum_to(&mut t, n - 2, |j| corr(Family::S(1), nu - j, j));
                sum_to(&mut t, n - 3, |j| corr(Family::S(3), nu - 1 - j, j));
                sum_to(&mut t, n - 4, |j| corr(Family::S(5), nu - 2 - j, j));
                sum_to(&mut t, n - 2, |j| corr(Family::S(7), nu - j, j));
                sum_to(&mut t, n - 3, |j| corr(Family::S(8), nu - 1 - j, j));
                sum_to(&mut t, n - 4, |j| corr(Family::S(9), nu - 2 - j, j));
                sum_to(&mut t, n - 5, |j| corr(Family::WL2, nu - 2 - j, j));
                sum_to(&mut t, n - 2, |j| corr(Family::M, nu - j, j));
            }
        }
        (CostKind::L2, Dim::Three) => {
            let n = k as isize - 1;
            let nu = n as usize;
            t.push(Term::P0Jet { j: nu });
            sum_to(&mut t, n - 4, |j| Term::PotInt { k: nu - 2 - j, j });
            sum_to(&mut t, n - 3, |j| corr(Family::S(1), nu - 1 - j, j));
            sum_to(&mut t, n - 4, |j| corr(Family::S(2), nu - 2 - j, j));
            sum_to(&mut t, n - 5, |j| corr(Family::S(3), nu - 3 - j, j));
            sum_to(&mut t, n - 6, |j| corr(Family::WL2, nu - 3 - j, j));
            sum_to(&mut t, n - 3, |j| corr(Family::M, nu - 1 - j, j));
        }
    }
    t
}

/// Correctors referenced by the first `order` coefficients.
pub fn required_fields(dim: Dim, cost: CostKind, order: usize) -> Vec<FieldId> {
    let mut ids: Vec<FieldId> = (1..=order)
        .flat_map(|k| formula(dim, cost, k))
        .filter_map(|t| match t {
            Term::CorrJet { id, .. } => Some(id),
            _ => None,
        })
        .collect();
    ids.sort();
    ids.dedup();
    ids
}

/// Which formulas assemble the ledger.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    General,
    /// f1, f2 constant: only a_0 and F^(2) are nonzero
    ConstantF,
    /// ω invariant under coordinate reflections: odd moments vanish
    Symmetric,
    /// unit ball, constant data, H1, d=2: closed forms for d^1..d^5
    Ball,
}

#[derive(Clone, Debug, Serialize)]
pub struct LedgerEntry {
    pub k: usize,
    pub scale: ScaleFunction,
    pub coeff: f64,
    pub breakdown: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpansionLedger {
    pub cost: CostKind,
    pub dim: Dim,
    pub order: usize,
    pub route: Route,
    /// grid spacing of the corrector solves
    pub h: f64,
    pub entries: Vec<LedgerEntry>,
}

impl ExpansionLedger {
    /// Σ_{k ≤ n} ℓ_k(ε) d^k.
    pub fn partial_sum(&self, eps: f64, n: usize) -> f64 {
        self.entries.iter().filter(|e| e.k <= n).map(|e| e.scale.eval(eps) * e.coeff).sum()
    }

    pub fn evaluate(&self, eps: f64) -> f64 {
        self.partial_sum(eps, usize::MAX)
    }

    pub fn coeff(&self, k: usize) -> Option<f64> {
        self.entries.iter().find(|e| e.k == k).map(|e| e.coeff)
    }
}

/// Baseline solves shared by all coefficients.
pub struct Baseline {
    pub u0: ScalarField,
    pub p0: ScalarField,
    pub correctors: CorrectorSet,
}

impl Baseline {
    /// u0, p0 and every corrector the problem's order needs (plus v^(2)).
    pub fn solve(problem: &Problem) -> Result<Self> {
        let solver = Solver::new(problem);
        let moments = problem.moments()?;
        let jet = problem.jet();
        let ff = FarField::new(&moments, &jet, problem.alpha1);
        let u0 = solver.solve_state(0.0)?;
        let p0 = solver.solve_adjoint(&u0)?;
        let mut ids = required_fields(problem.dim, problem.cost, problem.order);
        ids.push(FieldId { family: Family::V, k: 2 });
        let correctors = CorrectorSet::compute(&solver, &ff, &ids)?;
        Ok(Baseline { u0, p0, correctors })
    }
}

/// Evaluates terms against one problem and baseline.
pub struct Assembler<'a> {
    pub problem: &'a Problem,
    pub baseline: &'a Baseline,
    pub moments: MomentTable,
    pub jet: DataJet,
    route: Route,
    jets: RefCell<BTreeMap<(Option<FieldId>, usize), PointJet>>,
}

impl<'a> Assembler<'a> {
    pub fn new(problem: &'a Problem, baseline: &'a Baseline, route: Route) -> Result<Self> {
        let moments = problem.moments()?;
        let jet = problem.jet();
        let a = Assembler { problem, baseline, moments, jet, route, jets: RefCell::new(BTreeMap::new()) };
        a.check_route()?;
        Ok(a)
    }

    fn check_route(&self) -> Result<()> {
        let p = self.problem;
        let fail = |reason: &str| Err(Error::RouteNotApplicable { route: format!("{:?}", self.route), reason: reason.into() });
        match self.route {
            Route::General => Ok(()),
            Route::ConstantF if !self.jet.constant_data() => fail("f1 and f2 must be constant"),
            Route::Symmetric if !p.shape.is_symmetric() => fail("omega is not reflection symmetric"),
            Route::Ball if !p.shape.is_ball() => fail("omega must be the unit ball"),
            Route::Ball if !self.jet.constant_data() => fail("f1 and f2 must be constant"),
            Route::Ball if p.cost != CostKind::H1 || p.dim != Dim::Two => fail("closed forms exist for H1, d=2 only"),
            _ => Ok(()),
        }
    }

    fn farfield(&self) -> FarField<'_> {
        FarField::new(&self.moments, &self.jet, self.problem.alpha1)
    }

    /// a_j, with the structural zeros of the special routes applied.
    fn a(&self, j: usize) -> Poly {
        match self.route {
            Route::ConstantF | Route::Ball if j > 0 => Poly::zero(self.problem.dim.n()),
            _ => self.jet.a_polynomial(j),
        }
    }

    /// (1/|ω|)∫_ω q dy.
    fn mean(&self, q: &Poly) -> Result<f64> {
        if self.route == Route::Symmetric {
            let even = Poly::from_terms(q.dim(), q.terms().filter(|(e, _)| e.iter().all(|v| v % 2 == 0)).map(|(e, c)| (*e, *c)));
            return self.moments.mean_moment(&even);
        }
        self.moments.mean_moment(q)
    }

    fn field_jet(&self, id: Option<FieldId>, j: usize) -> Result<PointJet> {
        if let Some(jt) = self.jets.borrow().get(&(id, j)) {
            return Ok(jt.clone());
        }
        let field = match id {
            None => &self.baseline.p0,
            Some(id) => self
                .baseline
                .correctors
                .get(&id)
                .ok_or_else(|| Error::RouteNotApplicable { route: "jet".into(), reason: format!("corrector {id} was not solved") })?,
        };
        let jt = jet_at(field, &self.problem.x0, j)?;
        self.jets.borrow_mut().insert((id, j), jt.clone());
        Ok(jt)
    }

    /// mean of the degree-j Taylor part of (f2-f1)·X at x0.
    fn jet_term(&self, id: Option<FieldId>, j: usize) -> Result<f64> {
        let x = self.field_jet(id, j)?;
        let mut q = Poly::zero(self.problem.dim.n());
        for i in 0..=j {
            let a = self.a(i);
            if !a.is_zero() {
                q = q.add(&a.mul(&x.poly.homogeneous_part(j - i)));
            }
        }
        self.mean(&q)
    }

    /// The potential P^(k) of the configured cost.
    pub fn potential(&self, k: usize) -> Potential {
        let p = self.problem;
        match p.cost {
            CostKind::H1 => {
                let mut u = Potential::newton(&p.shape, &self.jet, k);
                u.prefactor *= -p.alpha2;
                u
            }
            CostKind::L2 => Potential::biharmonic(&p.shape, &self.jet, k, p.alpha1),
        }
    }

    fn pot_term(&self, k: usize, j: usize) -> Result<f64> {
        let a = self.a(j);
        if a.is_zero() || (matches!(self.route, Route::ConstantF) && k != 2) {
            return Ok(0.0);
        }
        let pot = self.potential(k);
        if pot.is_zero() {
            return Ok(0.0);
        }
        let s = integrate_over_shape(&self.problem.shape, 16, |y| a.eval(y) * pot.eval(y));
        Ok(s / self.moments.measure())
    }

    pub fn log_constant(&self, k: usize) -> Result<LogConstant> {
        Ok(LogConstant::new(k, self.farfield().b(k)?, self.problem.alpha2))
    }

    pub fn term(&self, t: &Term) -> Result<f64> {
        match *t {
            Term::P0Jet { j } => self.jet_term(None, j),
            Term::CorrJet { id, j } => self.jet_term(Some(id), j),
            Term::PotInt { k, j } => self.pot_term(k, j),
            Term::LogConst { k, j } => {
                let a = self.a(j);
                if a.is_zero() {
                    return Ok(0.0);
                }
                Ok(self.log_constant(k)?.c * self.mean(&a)?)
            }
        }
    }

    fn entry(&self, k: usize, parts: Vec<(String, f64)>) -> LedgerEntry {
        let coeff = parts.iter().map(|(_, v)| v).sum::<f64>() + 0.0;
        LedgerEntry { k, scale: ladder(self.problem.dim, k, self.moments.measure()), coeff, breakdown: parts.into_iter().collect() }
    }

    /// Ledger up to `order` terms.
    pub fn ledger(&self, order: usize) -> Result<ExpansionLedger> {
        let p = self.problem;
        let max = config::max_order(p.dim);
        if order > max {
            return Err(Error::OrderTooHigh { order, max });
        }
        let entries = match self.route {
            Route::Ball => (1..=order.min(5)).map(|k| self.ball_entry(k)).collect::<Result<Vec<_>>>()?,
            _ => (1..=order)
                .map(|k| {
                    let parts = formula(p.dim, p.cost, k)
                        .iter()
                        .map(|t| Ok((t.label(), self.term(t)?)))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(self.entry(k, parts))
                })
                .collect::<Result<Vec<_>>>()?,
        };
        Ok(ExpansionLedger { cost: p.cost, dim: p.dim, order, route: self.route, h: p.grid.h_max(), entries })
    }

    /// Closed forms for the unit disk with constant data (H1).
    fn ball_entry(&self, k: usize) -> Result<LedgerEntry> {
        let p = self.problem;
        let jump = self.jet.jump();
        let a0 = -jump;
        let parts = match k {
            1 => vec![("(f2-f1)p0(x0)".to_string(), a0 * self.field_jet(None, 0)?.value())],
            2 | 3 => vec![],
            4 => vec![("-alpha2 (f1-f2)^2/2".to_string(), -p.alpha2 * jump * jump / 2.0)],
            5 => {
                let hess = self.field_jet(None, 2)?;
                let lap: f64 = (0..2)
                    .map(|a| {
                        let mut e = [0u8; 3];
                        e[a] = 2;
                        hess.derivative(&e)
                    })
                    .sum();
                let v2 = self.field_jet(Some(FieldId { family: Family::V, k: 2 }), 0)?.value();
                vec![
                    ("(f2-f1) lap p0(x0)/8".to_string(), a0 * lap / 8.0),
                    ("alpha2 (f1-f2)^2/8".to_string(), p.alpha2 * jump * jump / 8.0),
                    ("alpha2 (f1-f2) v^(2)(x0)".to_string(), p.alpha2 * jump * v2),
                ]
            }
            _ => unreachable!(),
        };
        Ok(self.entry(k, parts))
    }
}

/// Convenience: baseline solves plus ledger.
pub fn expand(problem: &Problem, route: Route) -> Result<(Baseline, ExpansionLedger)> {
    let base = Baseline::solve(problem)?;
    let ledger = Assembler::new(problem, &base, route)?.ledger(problem.order)?;
    Ok((base, ledger))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_decays() {
        for dim in [Dim::Two, Dim::Three] {
            for k in 1..config::max_order(dim) {
                let (a, b) = (ladder(dim, k, 1.0), ladder(dim, k + 1, 1.0));
                let r1 = (b.eval(1e-3) / a.eval(1e-3)).abs();
                let r2 = (b.eval(1e-6) / a.eval(1e-6)).abs();
                assert!(r2 < r1 && r2 < 0.1, "{dim:?} k={k}");
            }
        }
        assert_eq!(ladder(Dim::Two, 4, 1.0), ScaleFunction { a: 4, log: 1, measure: 1.0 });
        assert_eq!(ladder(Dim::Two, 5, 1.0), ScaleFunction { a: 4, log: 0, measure: 1.0 });
    }

    #[test]
    fn formula_shapes() {
        // d^2 vanishes identically in both costs for d=2
        assert!(formula(Dim::Two, CostKind::H1, 2).is_empty());
        assert!(formula(Dim::Two, CostKind::L2, 2).is_empty());
        assert_eq!(formula(Dim::Two, CostKind::H1, 4), vec![Term::LogConst { k: 2, j: 0 }]);
        let d5 = formula(Dim::Two, CostKind::H1, 5);
        assert_eq!(d5.len(), 3);
        let l4 = formula(Dim::Two, CostKind::L2, 4);
        assert_eq!(l4, vec![corr(Family::S(2), 2, 0), corr(Family::N, 2, 0)]);
        let d3 = formula(Dim::Three, CostKind::H1, 4);
        assert!(d3.contains(&corr(Family::WH1, 2, 0)));
        let l34 = formula(Dim::Three, CostKind::L2, 4);
        assert_eq!(l34, vec![Term::P0Jet { j: 3 }, corr(Family::S(1), 2, 0), corr(Family::M, 2, 0)]);
    }

    #[test]
    fn empty_and_single_ledgers() {
        let mut l = ExpansionLedger { cost: CostKind::H1, dim: Dim::Two, order: 0, route: Route::General, h: 0.1, entries: vec![] };
        assert_eq!(l.evaluate(0.1), 0.0);
        l.entries.push(LedgerEntry { k: 1, scale: ladder(Dim::Two, 1, 3.0), coeff: 2.0, breakdown: BTreeMap::new() });
        assert!((l.evaluate(0.1) - 2.0 * 0.01 * 3.0).abs() < 1e-15);
        l.entries.push(LedgerEntry { k: 3, scale: ladder(Dim::Two, 3, 3.0), coeff: 5.0, breakdown: BTreeMap::new() });
        let r = l.evaluate(1e-4) / l.evaluate(2e-4);
        assert!((r - 0.25).abs() < 1e-3);
    }
}
