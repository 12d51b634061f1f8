//! ε-sweeps: direct J(Ω_ε) - J(Ω), comparison with the ledger, remainder
//! orders and least-squares coefficient extraction.

use crate::expansion::{ladder, ExpansionLedger, ScaleFunction};
use crate::fields::ScalarField;
use crate::problem::{H1Quadrature, Problem};
use crate::solver::Solver;
use crate::{CostKind, Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// Design matrices beyond this condition number are flagged.
pub const MAX_CONDITION: f64 = 1e10;

/// Direct increments on a fixed grid, sharing the baseline state.
pub struct DirectCost<'p> {
    pub problem: &'p Problem,
    solver: Solver<'p>,
    u0: ScalarField,
    misfit: ScalarField,
    /// A(u0 - u*) for the energy form of the H1 cost
    a_misfit: Vec<f64>,
}

impl<'p> DirectCost<'p> {
    pub fn new(problem: &'p Problem, u0: ScalarField) -> Self {
        let solver = Solver::new(problem);
        let misfit = u0.axpy(-1.0, &problem.u_star_field());
        let mut a_misfit = vec![0.0; misfit.values.len()];
        solver.op.apply_full(&misfit.values, &mut a_misfit);
        DirectCost { problem, solver, u0, misfit, a_misfit }
    }

    pub fn baseline(problem: &'p Problem) -> Result<Self> {
        let u0 = Solver::new(problem).solve_state(0.0)?;
        Ok(Self::new(problem, u0))
    }

    /// J(Ω_ε) - J(Ω). The state increment δ = u_ε - u_0 is solved from the
    /// load difference, and the cost difference is expanded exactly in δ
    /// (J is quadratic), which is algebraically the two-solve difference
    /// without its cancellation.
    pub fn delta_j(&self, eps: f64) -> Result<f64> {
        let p = self.problem;
        if p.alpha() == 0.0 {
            return Ok(0.0);
        }
        let delta = self.solver.solve_state_increment(eps)?;
        let g = &p.grid;
        let e = &self.misfit.values;
        let d = &delta.values;
        Ok(match (p.cost, p.h1_quadrature) {
            (CostKind::L2, _) => p.alpha1 * (0..g.len()).map(|i| g.weight(i) * (2.0 * e[i] + d[i]) * d[i]).sum::<f64>(),
            (CostKind::H1, H1Quadrature::Energy) => {
                let mut ad = vec![0.0; d.len()];
                self.solver.op.apply_full(d, &mut ad);
                p.alpha2 * (0..g.len()).map(|i| (2.0 * self.a_misfit[i] + ad[i]) * d[i]).sum::<f64>()
            }
            (CostKind::H1, H1Quadrature::Centered) => {
                let ue = self.u0.axpy(1.0, &delta);
                p.cost_value(&ue) - p.cost_value(&self.u0)
            }
        })
    }

    pub fn u0(&self) -> &ScalarField {
        &self.u0
    }

    pub fn solver(&self) -> &Solver<'p> {
        &self.solver
    }
}

/// Map over ε values on up to TOPODERIV_THREADS workers, results in input order.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = crate::thread_cap() {
            b = b.num_threads(n);
        }
        match b.build() {
            Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
            Err(_) => items.iter().map(f).collect(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SlopeFit {
    /// truncation order of the residual
    pub n: usize,
    /// slope of ln|r_N| against ln|ℓ_{N+1}|
    pub slope: f64,
    pub points: usize,
    pub noise_limited: bool,
}

/// Least-squares slope of ln|r| against ln|ℓ(ε)|, using the largest-ε points
/// down to the first one below `floor`.
pub fn fit_order(eps: &[f64], residuals: &[f64], scale: &ScaleFunction, floor: f64, n: usize) -> SlopeFit {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut noise_limited = false;
    for (e, r) in eps.iter().zip(residuals) {
        if r.abs() <= floor || !r.is_finite() {
            noise_limited = true;
            break;
        }
        xs.push(scale.eval(*e).abs().ln());
        ys.push(r.abs().ln());
    }
    if xs.len() < 3 {
        return SlopeFit { n, slope: f64::NAN, points: xs.len(), noise_limited: true };
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    SlopeFit { n, slope: sxy / sxx, points: xs.len(), noise_limited }
}

#[derive(Clone, Debug, Serialize)]
pub struct Extraction {
    pub ks: Vec<usize>,
    pub coeffs: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub condition: f64,
    pub ill_conditioned: bool,
    /// weighted RMS misfit of the fit
    pub rms: f64,
}

impl Extraction {
    pub fn coeff(&self, k: usize) -> Option<(f64, f64)> {
        self.ks.iter().position(|&j| j == k).map(|i| (self.coeffs[i], self.std_errors[i]))
    }
}

/// Weighted least squares of samples y_i ≈ Σ_k ℓ_k(ε_i) d_k over the given
/// ladder slots. Rows are weighted by 1/|ℓ_1(ε_i)| so every ε counts
/// equally in relative terms; columns are equilibrated before the SVD.
pub fn extract_coefficients(eps: &[f64], y: &[f64], scales: &[(usize, ScaleFunction)]) -> Result<Extraction> {
    let m = eps.len();
    let p = scales.len();
    if m < p + 2 {
        return Err(Error::TooFewSamples { have: m, need: p + 2 });
    }
    let w: Vec<f64> = eps.iter().map(|&e| 1.0 / scales[0].1.eval(e).abs()).collect();
    let mut a = DMatrix::from_fn(m, p, |i, j| w[i] * scales[j].1.eval(eps[i]));
    let b = DVector::from_fn(m, |i, _| w[i] * y[i]);
    let norms: Vec<f64> = (0..p).map(|j| a.column(j).norm()).collect();
    for j in 0..p {
        if norms[j] == 0.0 {
            return Err(Error::RankDeficient(format!("ladder slot {} vanishes on every sample", scales[j].0)));
        }
        a.column_mut(j).scale_mut(1.0 / norms[j]);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = smax / smin;
    if !condition.is_finite() {
        return Err(Error::IllConditioned(condition));
    }
    let z = svd.solve(&b, 0.0).map_err(|e| Error::RankDeficient(e.to_string()))?;
    let resid = &a * &z - &b;
    let dof = (m - p) as f64;
    let sigma2 = resid.norm_squared() / dof;
    // (AᵀA)^{-1} = V Σ^{-2} Vᵀ
    let vt = svd.v_t.as_ref().expect("V requested");
    let coeffs = (0..p).map(|j| z[j] / norms[j]).collect();
    let std_errors = (0..p)
        .map(|j| {
            let var: f64 = (0..p).map(|r| (vt[(r, j)] / svd.singular_values[r]).powi(2)).sum();
            (sigma2 * var).sqrt() / norms[j]
        })
        .collect();
    Ok(Extraction {
        ks: scales.iter().map(|s| s.0).collect(),
        coeffs,
        std_errors,
        condition,
        ill_conditioned: condition > MAX_CONDITION,
        rms: (resid.norm_squared() / m as f64).sqrt(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub h: f64,
    pub eps: Vec<f64>,
    pub direct: Vec<f64>,
    /// predicted[N-1][i] = Σ_{k≤N} ℓ_k(ε_i) d^k
    pub predicted: Vec<Vec<f64>>,
    /// residuals[N][i] = direct - predicted_N (N = 0 is ΔJ itself)
    pub residuals: Vec<Vec<f64>>,
    pub slopes: Vec<SlopeFit>,
    pub extraction: Option<Extraction>,
}

/// Noise floor of the residuals: solver tolerance relative to the increments.
pub fn noise_floor(problem: &Problem, direct: &[f64]) -> f64 {
    let scale = direct.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    scale * (problem.tol * 1e2).max(1e-12)
}

/// Direct increments for every ε (descending), in parallel.
pub fn direct_sweep(dc: &DirectCost, eps: &[f64]) -> Result<Vec<f64>> {
    par_map(eps, |&e| dc.delta_j(e)).into_iter().collect()
}

pub fn sweep(problem: &Problem, ledger: &ExpansionLedger, dc: &DirectCost, eps: &[f64]) -> Result<SweepResult> {
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidShape("eps list must be strictly decreasing".into()));
    }
    let direct = direct_sweep(dc, eps)?;
    let order = ledger.order;
    let predicted: Vec<Vec<f64>> = (1..=order).map(|n| eps.iter().map(|&e| ledger.partial_sum(e, n)).collect()).collect();
    let mut residuals = vec![direct.clone()];
    for pn in &predicted {
        residuals.push(direct.iter().zip(pn).map(|(d, p)| d - p).collect());
    }
    let floor = noise_floor(problem, &direct);
    let measure = ledger.entries.first().map(|e| e.scale.measure).unwrap_or(1.0);
    let slopes = (0..=order)
        .map(|n| fit_order(eps, &residuals[n], &ladder(problem.dim, n + 1, measure), floor, n))
        .collect();
    let scales: Vec<(usize, ScaleFunction)> = (1..=order).map(|k| (k, ladder(problem.dim, k, measure))).collect();
    let extraction = extract_coefficients(eps, &direct, &scales).ok();
    Ok(SweepResult { h: problem.grid.h_max(), eps: eps.to_vec(), direct, predicted, residuals, slopes, extraction })
}

impl SweepResult {
    /// CSV: eps, h, direct, pred_N and r_N for every N.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        let n = self.predicted.len();
        let mut head = vec!["eps".to_string(), "h".into(), "dj_direct".into()];
        head.extend((1..=n).map(|k| format!("pred_{k}")));
        head.extend((0..=n).map(|k| format!("r_{k}")));
        writeln!(f, "{}", head.join(","))?;
        for i in 0..self.eps.len() {
            let mut row = vec![self.eps[i], self.h, self.direct[i]];
            row.extend(self.predicted.iter().map(|p| p[i]));
            row.extend(self.residuals.iter().map(|r| r[i]));
            writeln!(f, "{}", row.iter().map(|v| crate::json::fmt17(*v)).collect::<Vec<_>>().join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Dim;

    #[test]
    fn synthetic_slopes() {
        let eps: Vec<f64> = (0..8).map(|i| 2f64.powf(-3.0 - 0.5 * i as f64)).collect();
        let cube = ScaleFunction { a: 3, log: 0, measure: 1.0 };
        let r: Vec<f64> = eps.iter().map(|e| 0.7 * e.powi(3)).collect();
        let s = fit_order(&eps, &r, &ScaleFunction { a: 1, log: 0, measure: 1.0 }, 0.0, 0);
        assert!((s.slope - 3.0).abs() < 0.05);
        let s = fit_order(&eps, &r, &cube, 0.0, 0);
        assert!((s.slope - 1.0).abs() < 1e-12);
        // log-carrying data regressed against the matching ladder slot
        let l = ladder(Dim::Two, 4, 1.0);
        let r: Vec<f64> = eps.iter().map(|&e| 2.0 * l.eval(e)).collect();
        assert!((fit_order(&eps, &r, &l, 0.0, 3).slope - 1.0).abs() < 1e-12);
        // pure noise
        let r = vec![1e-13; eps.len()];
        assert!(fit_order(&eps, &r, &cube, 1e-12, 0).noise_limited);
    }

    #[test]
    fn synthetic_extraction() {
        let eps: Vec<f64> = (0..9).map(|i| 2f64.powf(-3.0 - 0.5 * i as f64)).collect();
        let l1 = ladder(Dim::Two, 1, 1.0);
        let l3 = ladder(Dim::Two, 3, 1.0);
        let y: Vec<f64> = eps.iter().map(|&e| l1.eval(e) + 2.0 * l3.eval(e)).collect();
        let x = extract_coefficients(&eps, &y, &[(1, l1), (3, l3)]).unwrap();
        assert!((x.coeffs[0] - 1.0).abs() < 1e-10 && (x.coeffs[1] - 2.0).abs() < 1e-10);
        assert!(x.condition < 1e3);
    }
}
