//! Vertex-centred finite-volume Poisson solver with mixed boundary data, and
//! the state, adjoint and corrector solves built on it.
//!
//! The operator is assembled on dual cells: the flux between neighbouring
//! nodes is (dual-face area / spacing)·(u_i - u_j), Neumann data enter the
//! load as (boundary face area)·g, and Dirichlet nodes are eliminated. This is
//! the symmetric form of the second-order ghost-node scheme.

use crate::fields::{Face, GridSpec, ScalarField};
use crate::kernels::{FarField, RadialExpr, TermLabel};
use crate::problem::Problem;
use crate::{CostKind, Dim, Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
}

/// Matrix-free operator on a grid.
pub struct Poisson {
    pub grid: GridSpec,
    inv_hw: [Vec<f64>; 3],
    width: [Vec<f64>; 3],
    free: Vec<bool>,
}

impl Poisson {
    pub fn new(grid: &GridSpec) -> Self {
        let mut inv_hw: [Vec<f64>; 3] = Default::default();
        let mut width: [Vec<f64>; 3] = Default::default();
        for a in 0..3 {
            width[a] = (0..grid.n[a]).map(|i| grid.cell_width(a, i)).collect();
            inv_hw[a] = (0..grid.n[a]).map(|i| 1.0 / (grid.cell_width(a, i) * grid.h(a))).collect();
        }
        let free = (0..grid.len()).map(|i| !grid.is_dirichlet(grid.ijk(i))).collect();
        Poisson { grid: grid.clone(), inv_hw, width, free }
    }

    pub fn is_free(&self, idx: usize) -> bool {
        self.free[idx]
    }

    #[inline]
    fn vol(&self, i: usize, j: usize, k: usize) -> f64 {
        self.width[0][i] * self.width[1][j] * self.width[2][k]
    }

    /// out = A u over all nodes (rows of Dirichlet nodes included).
    pub fn apply_full(&self, u: &[f64], out: &mut [f64]) {
        let g = &self.grid;
        let [nx, ny, nz] = g.n;
        let d = g.dim.n();
        let sy = nx;
        let sz = nx * ny;
        for k in 0..nz {
            for j in 0..ny {
                let base = j * sy + k * sz;
                for i in 0..nx {
                    let idx = base + i;
                    let vol = self.vol(i, j, k);
                    let ui = u[idx];
                    let mut s = 0.0;
                    let c0 = vol * self.inv_hw[0][i];
                    if i > 0 {
                        s += c0 * (ui - u[idx - 1]);
                    }
                    if i + 1 < nx {
                        s += c0 * (ui - u[idx + 1]);
                    }
                    let c1 = vol * self.inv_hw[1][j];
                    if j > 0 {
                        s += c1 * (ui - u[idx - sy]);
                    }
                    if j + 1 < ny {
                        s += c1 * (ui - u[idx + sy]);
                    }
                    if d == 3 {
                        let c2 = vol * self.inv_hw[2][k];
                        if k > 0 {
                            s += c2 * (ui - u[idx - sz]);
                        }
                        if k + 1 < nz {
                            s += c2 * (ui - u[idx + sz]);
                        }
                    }
                    out[idx] = s;
                }
            }
        }
    }

    fn diag(&self) -> Vec<f64> {
        let g = &self.grid;
        let d = g.dim.n();
        (0..g.len())
            .map(|idx| {
                let ijk = g.ijk(idx);
                let vol = self.vol(ijk[0], ijk[1], ijk[2]);
                (0..d)
                    .map(|a| {
                        let nb = (ijk[a] > 0) as usize + (ijk[a] + 1 < g.n[a]) as usize;
                        vol * self.inv_hw[a][ijk[a]] * nb as f64
                    })
                    .sum()
            })
            .collect()
    }

    /// Load vector ∫ f φ_i + ∫_Σ g φ_i with nodal quadrature.
    pub fn load(&self, source: &[f64], neumann: &dyn Fn(&[f64; 3], Face) -> f64) -> Vec<f64> {
        let g = &self.grid;
        (0..g.len())
            .map(|idx| {
                let ijk = g.ijk(idx);
                let vol = self.vol(ijk[0], ijk[1], ijk[2]);
                let mut b = vol * source[idx];
                for f in g.faces_of(ijk) {
                    if !g.dirichlet[f.0] {
                        let area = vol / self.width[f.axis()][ijk[f.axis()]];
                        b += area * neumann(&g.point(idx), f);
                    }
                }
                b
            })
            .collect()
    }

    /// Solve A u = load on free nodes with u = dirichlet on Γ.
    pub fn solve(
        &self,
        load: &[f64],
        dirichlet: &dyn Fn(&[f64; 3]) -> f64,
        tol: f64,
        max_iter: usize,
    ) -> Result<(ScalarField, SolveStats)> {
        let g = &self.grid;
        let n = g.len();
        let mut ud = vec![0.0; n];
        let mut any_d = false;
        for (idx, v) in ud.iter_mut().enumerate() {
            if !self.free[idx] {
                *v = dirichlet(&g.point(idx));
                any_d |= *v != 0.0;
            }
        }
        let mut b: Vec<f64> = load.to_vec();
        if any_d {
            let mut t = vec![0.0; n];
            self.apply_full(&ud, &mut t);
            for i in 0..n {
                b[i] -= t[i];
            }
        }
        for i in 0..n {
            if !self.free[i] {
                b[i] = 0.0;
            }
        }
        let (x, stats) = self.cg(&b, tol, max_iter)?;
        let values = x.iter().zip(&ud).enumerate().map(|(i, (x, d))| if self.free[i] { *x } else { *d }).collect();
        Ok((ScalarField { grid: g.clone(), values }, stats))
    }

    fn cg(&self, b: &[f64], tol: f64, max_iter: usize) -> Result<(Vec<f64>, SolveStats)> {
        let n = b.len();
        let bnorm = dot(b, b).sqrt();
        let mut x = vec![0.0; n];
        if bnorm == 0.0 {
            return Ok((x, SolveStats::default()));
        }
        let dinv: Vec<f64> = self.diag().iter().enumerate().map(|(i, d)| if self.free[i] { 1.0 / d } else { 0.0 }).collect();
        let mut r = b.to_vec();
        let mut z: Vec<f64> = r.iter().zip(&dinv).map(|(r, d)| r * d).collect();
        let mut p = z.clone();
        let mut ap = vec![0.0; n];
        let mut rz = dot(&r, &z);
        for it in 1..=max_iter {
            self.apply_full(&p, &mut ap);
            for i in 0..n {
                if !self.free[i] {
                    ap[i] = 0.0;
                }
            }
            let alpha = rz / dot(&p, &ap);
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rn = dot(&r, &r).sqrt();
            if rn <= tol * bnorm {
                return Ok((x, SolveStats { iterations: it, residual: rn / bnorm }));
            }
            for i in 0..n {
                z[i] = r[i] * dinv[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        Err(Error::SolverNonConvergence { residual: dot(&r, &r).sqrt() / bnorm, iterations: max_iter })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Outward unit normal of a face as a vector.
fn normal(f: Face) -> [f64; 3] {
    let mut n = [0.0; 3];
    n[f.axis()] = f.sign();
    n
}

/// Shared solver for one problem and grid.
pub struct Solver<'p> {
    pub problem: &'p Problem,
    pub op: Poisson,
}

impl<'p> Solver<'p> {
    pub fn new(problem: &'p Problem) -> Self {
        Solver { op: Poisson::new(&problem.grid), problem }
    }

    fn solve_load(&self, load: &[f64], dirichlet: &dyn Fn(&[f64; 3]) -> f64) -> Result<ScalarField> {
        Ok(self.op.solve(load, dirichlet, self.problem.tol, self.problem.max_iter)?.0)
    }

    /// State for Ω_ε (ε = 0: baseline Ω).
    pub fn solve_state(&self, eps: f64) -> Result<ScalarField> {
        let p = self.problem;
        let src = p.source_from_fraction(&p.fraction(eps)?);
        let un = |x: &[f64; 3], _f: Face| p.u_n.eval(x);
        let load = self.op.load(&src.values, &un);
        self.solve_load(&load, &|x| p.u_d.eval(x))
    }

    /// u_ε - u_0 from the load difference (homogeneous boundary data).
    pub fn solve_state_increment(&self, eps: f64) -> Result<ScalarField> {
        let p = self.problem;
        let chi0 = p.fraction(0.0)?;
        let chi = p.fraction(eps)?;
        let g = &p.grid;
        let src: Vec<f64> = (0..g.len())
            .map(|i| {
                let x = g.point(i);
                let dc = chi.values[i].min(1.0) - chi0.values[i].min(1.0);
                (p.f1.eval(&x) - p.f2.eval(&x)) * dc
            })
            .collect();
        let load = self.op.load(&src, &|_, _| 0.0);
        self.solve_load(&load, &|_| 0.0)
    }

    /// Adjoint p0 of the baseline problem for the configured cost.
    pub fn solve_adjoint(&self, u0: &ScalarField) -> Result<ScalarField> {
        let p = self.problem;
        let e = u0.axpy(-1.0, &p.u_star_field());
        let load = match p.cost {
            CostKind::L2 => {
                let src = e.scale(-2.0 * p.alpha1);
                self.op.load(&src.values, &|_, _| 0.0)
            }
            CostKind::H1 => {
                let mut ae = vec![0.0; e.values.len()];
                self.op.apply_full(&e.values, &mut ae);
                ae.iter().map(|v| -2.0 * p.alpha2 * v).collect()
            }
        };
        self.solve_load(&load, &|_| 0.0)
    }

    /// Harmonic c with c = sign·g(x - x0) on Γ and ∂_n c = sign·∂_n g(x - x0) on Σ.
    pub fn solve_matching(&self, g: &RadialExpr, sign: f64) -> Result<ScalarField> {
        if g.is_zero() {
            return Ok(ScalarField::zeros(&self.problem.grid));
        }
        let x0 = &self.problem.x0;
        let d = self.problem.dim.n();
        let grad = g.gradient();
        let rel = |x: &[f64; 3]| {
            let mut y = [0.0; 3];
            for a in 0..d {
                y[a] = x[a] - x0[a];
            }
            y
        };
        let neumann = |x: &[f64; 3], f: Face| {
            let y = rel(x);
            let n = normal(f);
            sign * (0..d).map(|a| grad[a].eval(&y) * n[a]).sum::<f64>()
        };
        let zero = vec![0.0; self.problem.grid.len()];
        let load = self.op.load(&zero, &neumann);
        self.solve_load(&load, &|x| sign * g.eval(&rel(x)))
    }

    /// -Δz = source with homogeneous data.
    pub fn solve_source(&self, source: &ScalarField) -> Result<ScalarField> {
        let load = self.op.load(&source.values, &|_, _| 0.0);
        self.solve_load(&load, &|_| 0.0)
    }
}

/// Corrector families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Family {
    /// harmonic corrector of the Newton potential far field
    V,
    /// H1 adjoint corrector w = -α2 v
    WH1,
    /// L2 adjoint corrector of the S-terms
    WL2,
    /// -Δm = -α1 v
    M,
    /// -Δn = -α1 b
    N,
    /// correctors of the leading biharmonic terms, s_1 .. s_9
    S(u8),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FieldId {
    pub family: Family,
    pub k: usize,
}

impl fmt::Display for FieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::V => write!(f, "v^({})", self.k),
            Family::WH1 | Family::WL2 => write!(f, "w^({})", self.k),
            Family::M => write!(f, "m^({})", self.k),
            Family::N => write!(f, "n^({})", self.k),
            Family::S(i) => write!(f, "s{}^({})", i, self.k),
        }
    }
}

impl FieldId {
    pub fn slug(&self) -> String {
        match self.family {
            Family::V => format!("v{}", self.k),
            Family::WH1 | Family::WL2 => format!("w{}", self.k),
            Family::M => format!("m{}", self.k),
            Family::N => format!("n{}", self.k),
            Family::S(i) => format!("s{}_{}", i, self.k),
        }
    }
}

/// Boundary data of v^(k): Σ_{j=1}^{k} R_j^{(k-j+1)}.
pub fn v_far_field(ff: &FarField, k: usize) -> Result<RadialExpr> {
    let mut e = RadialExpr::zero(ff.dim);
    for j in 1..=k {
        e.add_scaled(&ff.r(k - j + 1, j)?.expr, 1.0);
    }
    e.prune(1e-14);
    Ok(e)
}

/// Boundary data of the L2 corrector w^(k): Σ_{ℓ=1}^{k} S_ℓ^{(k-ℓ)}.
pub fn w_far_field(ff: &FarField, k: usize) -> Result<RadialExpr> {
    let mut e = RadialExpr::zero(ff.dim);
    for l in 1..=k.saturating_sub(2) {
        e.add_scaled(&ff.s(k - l, l)?.expr, 1.0);
    }
    e.prune(1e-14);
    Ok(e)
}

/// Matching data (sign, g) of the s-corrector `i` for source order k.
pub fn s_far_field(ff: &FarField, i: u8, k: usize) -> Result<(f64, RadialExpr)> {
    let terms = ff.leading_ab(k)?;
    let find = |label: TermLabel, index: i32| {
        terms.iter().find(|t| t.label == label && t.index == index).map(|t| t.expr.clone()).expect("term exists")
    };
    let (sign, mut e) = match ff.dim {
        Dim::Two => match i {
            1 => (-1.0, find(TermLabel::A, 2)),
            2 => (1.0, find(TermLabel::A, 2).log_companion()),
            3 => (-1.0, find(TermLabel::A, 1)),
            4 => (1.0, find(TermLabel::A, 1).log_companion()),
            5 => (-1.0, find(TermLabel::A, 0)),
            6 => (1.0, find(TermLabel::A, 0).log_companion()),
            7 => (-1.0, find(TermLabel::B, 2)),
            8 => (-1.0, find(TermLabel::B, 1)),
            9 => (-1.0, find(TermLabel::B, 0)),
            _ => panic!("s-corrector index {i} out of range in d=2"),
        },
        Dim::Three => match i {
            1 => (-1.0, find(TermLabel::A, 1)),
            2 => (-1.0, find(TermLabel::A, 0)),
            3 => (-1.0, find(TermLabel::A, -1)),
            _ => panic!("s-corrector index {i} out of range in d=3"),
        },
    };
    e.prune(1e-14);
    Ok((sign, e))
}

/// Solved correctors, keyed by family and order.
#[derive(Clone, Debug, Default)]
pub struct CorrectorSet {
    pub fields: BTreeMap<FieldId, ScalarField>,
}

impl CorrectorSet {
    pub fn get(&self, id: &FieldId) -> Option<&ScalarField> {
        self.fields.get(id)
    }

    /// Solve every requested corrector (and the ones they depend on).
    pub fn compute(solver: &Solver, ff: &FarField, ids: &[FieldId]) -> Result<Self> {
        let mut set = CorrectorSet::default();
        for id in ids {
            set.ensure(solver, ff, *id)?;
        }
        Ok(set)
    }

    fn ensure(&mut self, solver: &Solver, ff: &FarField, id: FieldId) -> Result<()> {
        if self.fields.contains_key(&id) {
            return Ok(());
        }
        let p = solver.problem;
        let field = match id.family {
            Family::V => solver.solve_matching(&v_far_field(ff, id.k)?, -1.0)?,
            Family::WH1 => {
                let v = FieldId { family: Family::V, k: id.k };
                self.ensure(solver, ff, v)?;
                self.fields[&v].scale(-p.alpha2)
            }
            Family::WL2 => solver.solve_matching(&w_far_field(ff, id.k)?, -1.0)?,
            Family::M => {
                let v = FieldId { family: Family::V, k: id.k };
                self.ensure(solver, ff, v)?;
                let src = self.fields[&v].scale(-p.alpha1);
                if src.max_abs() == 0.0 {
                    ScalarField::zeros(&p.grid)
                } else {
                    solver.solve_source(&src)?
                }
            }
            Family::N => {
                let b = ff.b(id.k)?;
                if b == 0.0 {
                    ScalarField::zeros(&p.grid)
                } else {
                    let src = ScalarField { grid: p.grid.clone(), values: vec![-p.alpha1 * b; p.grid.len()] };
                    solver.solve_source(&src)?
                }
            }
            Family::S(i) => {
                let (sign, g) = s_far_field(ff, i, id.k)?;
                solver.solve_matching(&g, sign)?
            }
        };
        self.fields.insert(id, field);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manufactured_dirichlet_neumann() {
        // u = sin(x) e^y on the unit square, Γ = x-, Neumann elsewhere
        let exact = |x: &[f64; 3]| x[0].sin() * x[1].exp();
        let grad = |x: &[f64; 3]| [x[0].cos() * x[1].exp(), x[0].sin() * x[1].exp()];
        let mut errs = Vec::new();
        for n in [33, 65] {
            let g = GridSpec::unit(Dim::Two, n);
            let op = Poisson::new(&g);
            let src: Vec<f64> = (0..g.len()).map(|_| 0.0).collect();
            let src: Vec<f64> = src.iter().enumerate().map(|(i, _)| {
                let x = g.point(i);
                // -Δ(sin x e^y) = sin x e^y - sin x e^y = 0; add a non-harmonic part x²y
                -(2.0 * x[1])
            }).collect();
            let full = |x: &[f64; 3]| exact(x) + x[0] * x[0] * x[1];
            let gfull = |x: &[f64; 3]| {
                let gr = grad(x);
                [gr[0] + 2.0 * x[0] * x[1], gr[1] + x[0] * x[0]]
            };
            let neu = |x: &[f64; 3], f: Face| gfull(x)[f.axis()] * f.sign();
            let load = op.load(&src, &neu);
            let (u, _) = op.solve(&load, &full, 1e-12, 100_000).unwrap();
            let err = (0..g.len()).map(|i| (u.values[i] - full(&g.point(i))).abs()).fold(0.0, f64::max);
            errs.push(err);
        }
        let rate = (errs[0] / errs[1]).log2();
        assert!((rate - 2.0).abs() < 0.15, "rate {rate}, errors {errs:?}");
    }
}
