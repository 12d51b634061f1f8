//! The acceptance suite: each criterion runs independently and reports a
//! measured value against a tolerance pinned here.

use crate::config::{default_eps, RunConfig};
use crate::expansion::{expand, Assembler, Baseline, ExpansionLedger, Route};
use crate::fields::{Face, GridSpec, ScalarField};
use crate::kernels::{biharmonic_fundamental, laplace_fundamental, FarField, Kernel};
use crate::moments::{compute_moments, DataJet, Shape};
use crate::poly::Poly;
use crate::potentials::{ball_u2_closed, Potential};
use crate::problem::Problem;
use crate::solver::{v_far_field, Poisson, Solver};
use crate::verify::{extract_coefficients, sweep, DirectCost, SweepResult};
use crate::{CostKind, Dim, Result};
use serde::Serialize;
use std::cell::OnceCell;
use std::time::Instant;

pub const MEAN_VALUE_TOL: f64 = 1e-8;
pub const MEAN_VALUE_SECONDS: f64 = 10.0;
/// Allowed ratio between the h²-constants of two grids.
pub const H2_CONSTANT_RATIO: (f64, f64) = (0.5, 2.0);
pub const D1_REL_TOL: f64 = 0.01;
pub const ZERO_SLOT_SIGMAS: f64 = 3.0;
pub const D4_REL_TOL: f64 = 0.10;
pub const MIN_REMAINDER_SLOPE: f64 = 0.9;
pub const ROUTE_TOL: f64 = 1e-8;
pub const FD_TOL: f64 = 1e-3;
pub const FARFIELD_FACTOR: f64 = 1.3;
pub const MMS_SLOPE: (f64, f64) = (1.9, 2.1);
pub const ROUND_TRIP_TOL: f64 = 1e-9;
pub const SELFTEST_SECONDS: f64 = 1800.0;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("{tag} [{:>2}] {}: {} ({:.1} s)", self.id, self.name, self.detail, self.seconds)
    }
}

/// Grid sizes of the suite.
#[derive(Clone, Copy, Debug)]
pub struct SelftestOptions {
    pub fine_2d: usize,
    pub fine_3d: usize,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        SelftestOptions { fine_2d: 513, fine_3d: 129 }
    }
}

/// The reference configuration: unit box, Γ = {x = 0}, unit-ball inclusion at
/// the centre, f1 = 3, f2 = 1 and u* = x² + y/2.
pub fn reference_config(dim: Dim, cost: CostKind, nodes: usize, order: usize) -> RunConfig {
    let d = dim.n();
    let z = |v: &str| if d == 3 { format!("{v}, 0") } else { v.to_string() };
    let zeros = if d == 3 { "0.0, 0.0, 0.0" } else { "0.0, 0.0" };
    let ones = if d == 3 { "1.0, 1.0, 1.0" } else { "1.0, 1.0" };
    let x0 = if d == 3 { "0.5, 0.5, 0.5" } else { "0.5, 0.5" };
    let (cost, alpha) = match cost {
        CostKind::H1 => ("H1", "alpha2 = 1.0"),
        CostKind::L2 => ("L2", "alpha1 = 1.0"),
    };
    let text = format!(
        "dim = {d}\ncost = \"{cost}\"\n{alpha}\nx0 = [{x0}]\norder = {order}\n\
         [domain]\nlo = [{zeros}]\nhi = [{ones}]\nnodes = {nodes}\ndirichlet = [\"x-\"]\n\
         [shape]\nkind = \"ball\"\n\
         [data]\nf1 = [[3.0, [{c}]]]\nf2 = [[1.0, [{c}]]]\nu_star = [[1.0, [{xx}]], [0.5, [{y}]]]\n",
        c = z("0, 0"),
        xx = z("2, 0"),
        y = z("0, 1"),
    );
    RunConfig::from_toml(&text).expect("reference config parses")
}

pub fn reference_problem(dim: Dim, cost: CostKind, nodes: usize, order: usize) -> Problem {
    reference_config(dim, cost, nodes, order).build().expect("reference config is valid")
}

/// One baseline, ledger and sweep of a reference problem.
pub struct SweepCase {
    pub problem: Problem,
    pub baseline: Baseline,
    pub ledger: ExpansionLedger,
    pub sweep: SweepResult,
}

impl SweepCase {
    pub fn run(problem: Problem) -> Result<Self> {
        let (baseline, ledger) = expand(&problem, Route::General)?;
        let dc = DirectCost::new(&problem, baseline.u0.clone());
        let eps = default_eps(1.0);
        let sweep = sweep(&problem, &ledger, &dc, &eps)?;
        Ok(SweepCase { problem, baseline, ledger, sweep })
    }
}

/// Shared expensive state between criteria.
pub struct Suite {
    pub opts: SelftestOptions,
    h1: OnceCell<Result<SweepCase>>,
    l2: OnceCell<Result<SweepCase>>,
}

fn report(id: u8, name: &str, t: Instant, r: Result<(bool, String)>) -> CriterionReport {
    let (passed, detail) = r.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionReport { id, name: name.into(), passed, detail, seconds: t.elapsed().as_secs_f64() }
}

fn err_text(e: &crate::Error) -> crate::Error {
    crate::Error::Parse(format!("shared sweep failed: {e}"))
}

impl Suite {
    pub fn new(opts: SelftestOptions) -> Self {
        Suite { opts, h1: OnceCell::new(), l2: OnceCell::new() }
    }

    fn case(&self, cost: CostKind) -> Result<&SweepCase> {
        let (cell, order) = match cost {
            CostKind::H1 => (&self.h1, 5),
            CostKind::L2 => (&self.l2, 5),
        };
        let c = cell.get_or_init(|| SweepCase::run(reference_problem(Dim::Two, cost, self.opts.fine_2d, order)));
        c.as_ref().map_err(err_text)
    }

    pub fn run(&self, id: u8) -> CriterionReport {
        let t = Instant::now();
        match id {
            1 => report(1, "mean-value identity", t, c1_mean_value()),
            2 => report(2, "exact spherical expansion", t, self.c2_spherical()),
            3 => report(3, "first derivative from sweep", t, self.c3_first_derivative()),
            4 => report(4, "vanishing ladder slots", t, self.c4_vanishing()),
            5 => report(5, "ball d4", t, self.c5_ball_d4()),
            6 => report(6, "remainder orders", t, self.c6_remainders()),
            7 => report(7, "consistency identities and routes", t, self.c7_routes()),
            8 => report(8, "kernel and potential PDE checks", t, c8_pde_checks()),
            9 => report(9, "solver convergence order", t, c9_manufactured()),
            10 => report(10, "oracle closure", t, c10_round_trip()),
            _ => report(id, "unknown criterion", t, Ok((false, "no such criterion".into()))),
        }
    }

    /// Every criterion in order; the runtime bound of 10 is checked on the whole run.
    pub fn run_all(&self) -> Vec<CriterionReport> {
        let t = Instant::now();
        let mut out: Vec<CriterionReport> = (1..=10).map(|i| self.run(i)).collect();
        let total = t.elapsed().as_secs_f64();
        let last = out.last_mut().expect("ten reports");
        last.passed &= total < SELFTEST_SECONDS;
        last.detail.push_str(&format!("; suite {total:.0} s (limit {SELFTEST_SECONDS:.0} s)"));
        out
    }

    fn c2_spherical(&self) -> Result<(bool, String)> {
        let mut ok = true;
        let mut msgs = Vec::new();
        for (dim, grids) in [(Dim::Two, [self.opts.fine_2d / 2 + 1, self.opts.fine_2d]), (Dim::Three, [self.opts.fine_3d / 2 + 1, self.opts.fine_3d])] {
            let mut consts = Vec::new();
            for nodes in grids {
                let p = reference_problem(dim, CostKind::H1, nodes, 1);
                consts.push(spherical_h2_constant(&p)?);
            }
            let ratio = consts[0] / consts[1];
            let pass = ratio >= H2_CONSTANT_RATIO.0 && ratio <= H2_CONSTANT_RATIO.1;
            ok &= pass;
            msgs.push(format!("d={} C={:.3e}/{:.3e} ratio {:.3}", dim.n(), consts[0], consts[1], ratio));
        }
        Ok((ok, format!("{} (ratio in [{}, {}])", msgs.join("; "), H2_CONSTANT_RATIO.0, H2_CONSTANT_RATIO.1)))
    }

    fn c3_first_derivative(&self) -> Result<(bool, String)> {
        let mut ok = true;
        let mut msgs = Vec::new();
        for cost in [CostKind::H1, CostKind::L2] {
            let c = self.case(cost)?;
            let d1 = c.ledger.coeff(1).unwrap_or(f64::NAN);
            let ex = c.sweep.extraction.as_ref().ok_or(crate::Error::TooFewSamples { have: 0, need: 7 })?;
            let (hat, _) = ex.coeff(1).unwrap_or((f64::NAN, f64::NAN));
            let rel = ((hat - d1) / d1).abs();
            ok &= rel < D1_REL_TOL;
            msgs.push(format!("{cost:?}: d1 {d1:.6} fit {hat:.6} rel {rel:.1e}"));
        }
        Ok((ok, format!("{} (tol {D1_REL_TOL})", msgs.join("; "))))
    }

    /// The vanishing statements are for the gradient cost; the L2 sweep is
    /// truncation-biased in these slots (its r_5 is still ~ε^6 at ε=1/8).
    fn c4_vanishing(&self) -> Result<(bool, String)> {
        let c = self.case(CostKind::H1)?;
        let ex = c.sweep.extraction.as_ref().ok_or(crate::Error::TooFewSamples { have: 0, need: 7 })?;
        let mut ok = true;
        let mut msgs = Vec::new();
        for k in [2, 3] {
            let formula = c.ledger.coeff(k).unwrap_or(f64::NAN);
            let (v, s) = ex.coeff(k).unwrap_or((f64::NAN, f64::NAN));
            ok &= formula == 0.0 && v.abs() < ZERO_SLOT_SIGMAS * s;
            msgs.push(format!("H1 d{k} formula {formula} fit {v:.2e}±{s:.1e}"));
        }
        Ok((ok, format!("{} (|d| < {ZERO_SLOT_SIGMAS} sigma)", msgs.join("; "))))
    }

    fn c5_ball_d4(&self) -> Result<(bool, String)> {
        let c = self.case(CostKind::H1)?;
        let p = &c.problem;
        let jump = p.jet().jump();
        let closed = -p.alpha2 * jump * jump / 2.0;
        let formula = c.ledger.coeff(4).unwrap_or(f64::NAN);
        let ex = c.sweep.extraction.as_ref().ok_or(crate::Error::TooFewSamples { have: 0, need: 7 })?;
        let (hat, s) = ex.coeff(4).unwrap_or((f64::NAN, f64::NAN));
        let rel = ((hat - closed) / closed).abs();
        let exact = formula.to_bits() == closed.to_bits();
        Ok((
            exact && rel < D4_REL_TOL,
            format!(
                "formula {formula} closed {closed} (bit-exact {exact}); fit {hat:.4}±{s:.1e} rel {rel:.2e} (tol {D4_REL_TOL}, cond {:.1e})",
                ex.condition
            ),
        ))
    }

    fn c6_remainders(&self) -> Result<(bool, String)> {
        let c = self.case(CostKind::H1)?;
        let mut ok = true;
        let mut msgs = Vec::new();
        for n in 1..=3 {
            let s = &c.sweep.slopes[n];
            let pass = s.slope >= MIN_REMAINDER_SLOPE && s.points >= 4;
            ok &= pass;
            msgs.push(format!("N={n} slope {:.3} ({} pts)", s.slope, s.points));
        }
        Ok((ok, format!("{} (min {MIN_REMAINDER_SLOPE})", msgs.join("; "))))
    }

    fn c7_routes(&self) -> Result<(bool, String)> {
        let c = self.case(CostKind::H1)?;
        let p = &c.problem;
        let general = Assembler::new(p, &c.baseline, Route::General)?;
        // c = -α2 b with b recomputed from the moment table
        let mut bit = true;
        for k in 2..=4 {
            let lc = general.log_constant(k)?;
            let b = -general.moments.weighted_moment(&p.jet().f_polynomial(k))? / (2.0 * std::f64::consts::PI);
            let b = if p.jet().f_polynomial(k).is_zero() { 0.0 } else { b };
            bit &= lc.b.to_bits() == b.to_bits() && lc.c.to_bits() == (-p.alpha2 * b).to_bits();
        }
        // P = -α2 U on and off ω
        let u = Potential::newton(&p.shape, &p.jet(), 2);
        let pp = general.potential(2);
        for x in [[0.0, 0.0], [0.3, -0.4], [1.5, 0.2], [-3.0, 2.0]] {
            bit &= pp.eval(&x).to_bits() == (-p.alpha2 * u.eval(&x)).to_bits();
        }
        // d4 sign identity
        let jump = p.jet().jump();
        let b2 = general.log_constant(2)?.b;
        let c2 = general.log_constant(2)?.c;
        let d4 = c.ledger.coeff(4).unwrap_or(f64::NAN);
        let sign_ok = (d4 - p.alpha2 * jump * b2).abs() <= 1e-15 * d4.abs() && (d4 - (-jump) * c2).abs() <= 1e-15 * d4.abs();
        let mut worst = 0.0f64;
        for route in [Route::ConstantF, Route::Symmetric, Route::Ball] {
            let l = Assembler::new(p, &c.baseline, route)?.ledger(5)?;
            for k in 1..=5 {
                let a = c.ledger.coeff(k).unwrap_or(f64::NAN);
                let b = l.coeff(k).unwrap_or(f64::NAN);
                worst = worst.max((a - b).abs() / a.abs().max(1.0));
            }
        }
        Ok((
            bit && sign_ok && worst < ROUTE_TOL,
            format!("bit-exact c/P identities {bit}; d4 sign identity {sign_ok}; max route difference {worst:.2e} (tol {ROUTE_TOL})"),
        ))
    }
}

/// max over ε of |(u_ε - u0)_h - ε²(U²(·/ε) + v² + ln ε b²)|∞ / h² (d=2),
/// or with ε²U²(·/ε) + ε³v² (d=3).
pub fn spherical_h2_constant(p: &Problem) -> Result<f64> {
    let solver = Solver::new(p);
    let moments = p.moments()?;
    let jet = p.jet();
    let ff = FarField::new(&moments, &jet, p.alpha1);
    let v2 = solver.solve_matching(&v_far_field(&ff, 2)?, -1.0)?;
    let b2 = ff.b(2)?;
    let jump = jet.jump();
    let h = p.grid.h_max();
    let d = p.dim.n();
    let mut worst = 0.0f64;
    for i in 3..=6 {
        let eps = 2f64.powi(-i);
        let delta = solver.solve_state_increment(eps)?;
        let mut err = 0.0f64;
        for (idx, dv) in delta.values.iter().enumerate() {
            let x = p.grid.point(idx);
            let y: Vec<f64> = (0..d).map(|a| (x[a] - p.x0[a]) / eps).collect();
            let u2 = ball_u2_closed(&y, p.dim, jump);
            let rec = match p.dim {
                Dim::Two => eps * eps * (u2 + v2.values[idx] + eps.ln() * b2),
                Dim::Three => eps * eps * u2 + eps.powi(3) * v2.values[idx],
            };
            err = err.max((dv - rec).abs());
        }
        worst = worst.max(err / (h * h));
    }
    Ok(worst)
}

pub fn c1_mean_value() -> Result<(bool, String)> {
    let t = Instant::now();
    let mut worst = 0.0f64;
    for dim in [Dim::Two, Dim::Three] {
        let d = dim.n();
        let shape = Shape::unit_ball(dim);
        let measure = compute_moments(&shape, 0)?.measure();
        let pot = Potential::new(&shape, Poly::constant(d, 1.0), Kernel::Laplace, 1.0);
        for i in 0..20 {
            let r = 1.05 * (10.0f64 / 1.05).powf(i as f64 / 19.0);
            let th = 0.7 + 2.3 * i as f64;
            let ph = 0.4 + 1.1 * i as f64;
            let x = match dim {
                Dim::Two => vec![r * th.cos(), r * th.sin()],
                Dim::Three => vec![r * th.cos() * ph.sin(), r * th.sin() * ph.sin(), r * ph.cos()],
            };
            let exact = measure * laplace_fundamental(&x, dim)?;
            let v = pot.eval_checked(&x)?;
            worst = worst.max(((v - exact) / exact).abs());
        }
    }
    let secs = t.elapsed().as_secs_f64();
    Ok((
        worst < MEAN_VALUE_TOL && secs < MEAN_VALUE_SECONDS,
        format!("max rel err {worst:.2e} at 20 points per dimension (tol {MEAN_VALUE_TOL}), {secs:.2} s"),
    ))
}

/// Five-point Laplacian with step s.
fn fd_laplacian(f: &dyn Fn(&[f64]) -> f64, x: &[f64], s: f64) -> f64 {
    let mut lap = 0.0;
    let f0 = f(x);
    for a in 0..x.len() {
        let mut p = x.to_vec();
        let mut m = x.to_vec();
        p[a] += s;
        m[a] -= s;
        lap += (f(&p) - 2.0 * f0 + f(&m)) / (s * s);
    }
    lap
}

/// Fibonacci points on the sphere of radius r (a uniform circle for d=2).
fn sphere_points(d: usize, r: f64) -> Vec<Vec<f64>> {
    let n = 64;
    (0..n)
        .map(|i| {
            let t = (i as f64 + 0.5) / n as f64;
            if d == 2 {
                let a = 2.0 * std::f64::consts::PI * t;
                vec![r * a.cos(), r * a.sin()]
            } else {
                let z = 1.0 - 2.0 * t;
                let a = i as f64 * std::f64::consts::PI * (3.0 - 5f64.sqrt());
                let s = (1.0 - z * z).sqrt();
                vec![r * s * a.cos(), r * s * a.sin(), r * z]
            }
        })
        .collect()
}

fn triangle() -> Shape {
    Shape::Polygon { vertices: vec![[-0.6, -0.5], [0.9, -0.3], [-0.1, 0.8]] }
}

/// A single tetrahedron around the origin without reflection symmetry.
fn offset_tet() -> Shape {
    Shape::TetMesh {
        vertices: vec![[-0.5, -0.4, -0.3], [0.9, -0.2, -0.25], [-0.1, 0.8, -0.35], [0.05, 0.1, 0.7]],
        tets: vec![[0, 1, 2, 3]],
    }
}

pub fn c8_pde_checks() -> Result<(bool, String)> {
    let mut worst_phi = 0.0f64;
    for dim in [Dim::Two, Dim::Three] {
        for x in [[0.7, 0.2, -0.3], [-1.5, 0.9, 0.4], [2.0, -2.5, 1.0]] {
            let x = &x[..dim.n()];
            let phi = |y: &[f64]| biharmonic_fundamental(y, dim).unwrap_or(f64::NAN);
            let res = -fd_laplacian(&phi, x, 1e-3) - laplace_fundamental(x, dim)?;
            worst_phi = worst_phi.max((res / laplace_fundamental(x, dim)?).abs());
        }
    }
    // -ΔP = -α1 U for a linear density on a triangle and on the disk
    let alpha1 = 1.5;
    let mut worst_p = 0.0f64;
    for (shape, dim) in [(triangle(), Dim::Two), (Shape::unit_ball(Dim::Two), Dim::Two), (Shape::unit_ball(Dim::Three), Dim::Three)] {
        let d = dim.n();
        let f1 = Poly::from_terms(d, [([0, 0, 0], 2.0), ([1, 0, 0], 0.5), ([0, 1, 0], -0.7)]);
        let jet = DataJet::new(dim, &vec![0.0; d], &f1, &Poly::zero(d), &Poly::zero(d));
        for k in [2, 3] {
            let u = Potential::newton(&shape, &jet, k);
            let p = Potential::biharmonic(&shape, &jet, k, alpha1);
            for x in [[0.1, 0.05, 0.0], [0.3, -0.2, 0.1], [1.7, 0.4, -0.3], [-2.2, 1.3, 0.5]] {
                let x = &x[..d];
                let res = -fd_laplacian(&|y| p.eval(y), x, 5e-3) + alpha1 * u.eval(x);
                worst_p = worst_p.max((res / (alpha1 * u.eval(x)).abs().max(1e-3)).abs());
            }
        }
    }
    // far-field remainders of U after N multipole terms decay like |x|^{2-d-N}
    let mut worst_ratio = 1.0f64;
    for (shape, dim) in [(triangle(), Dim::Two), (offset_tet(), Dim::Three)] {
        let d = dim.n();
        let f1 = Poly::from_terms(d, [([0, 0, 0], 1.0), ([1, 0, 0], 0.8), ([0, 1, 0], 0.3)]);
        let jet = DataJet::new(dim, &vec![0.0; d], &f1, &Poly::zero(d), &Poly::zero(d));
        let moments = compute_moments(&shape, 8)?;
        let ff = FarField::new(&moments, &jet, 0.0);
        for k in [2, 3] {
            let u = Potential::newton(&shape, &jet, k);
            for n in 1..=3 {
                let terms = (1..=n).map(|l| ff.r(k, l)).collect::<Result<Vec<_>>>()?;
                let rem = |x: &[f64]| u.eval(x) - terms.iter().map(|t| t.eval(x)).sum::<f64>();
                // sup over a fixed direction set: a single ray can sit near a zero of the next term
                let sup = |r: f64| sphere_points(d, r).iter().map(|x| rem(x).abs()).fold(0.0, f64::max);
                let ratio = sup(32.0) / sup(16.0);
                let expected = 2f64.powi(2 - d as i32 - n as i32);
                let q = (ratio / expected).abs();
                let q = q.max(1.0 / q);
                worst_ratio = worst_ratio.max(q);
            }
        }
    }
    Ok((
        worst_phi < FD_TOL && worst_p < FD_TOL && worst_ratio < FARFIELD_FACTOR,
        format!(
            "-Δφ=E residual {worst_phi:.1e}, -ΔP=-α1U residual {worst_p:.1e} (tol {FD_TOL}); far-field decay factor {worst_ratio:.3} (tol {FARFIELD_FACTOR})"
        ),
    ))
}

/// Max-norm errors of a manufactured solution on a sequence of grids.
pub fn manufactured_errors(dim: Dim, dirichlet: &[Face], grids: &[usize]) -> Result<Vec<f64>> {
    let d = dim.n();
    // u = sin(x) e^y cos(z) + x² y has -Δu = -2y (d=2) or sin x e^y cos z - 2y (d=3)
    let exact = move |x: &[f64; 3]| x[0].sin() * x[1].exp() * if d == 3 { x[2].cos() } else { 1.0 } + x[0] * x[0] * x[1];
    let grad = move |x: &[f64; 3]| {
        let c = if d == 3 { x[2].cos() } else { 1.0 };
        let s = if d == 3 { -x[2].sin() } else { 0.0 };
        [x[0].cos() * x[1].exp() * c + 2.0 * x[0] * x[1], x[0].sin() * x[1].exp() * c + x[0] * x[0], x[0].sin() * x[1].exp() * s]
    };
    let source = move |x: &[f64; 3]| -2.0 * x[1] + if d == 3 { x[0].sin() * x[1].exp() * x[2].cos() } else { 0.0 };
    let mut mask = [false; 6];
    for f in dirichlet {
        mask[f.0] = true;
    }
    let mut errs = Vec::new();
    for &n in grids {
        let lo = vec![0.0; d];
        let hi = vec![1.0; d];
        let g = GridSpec::new(dim, &lo, &hi, n, mask);
        let op = Poisson::new(&g);
        let src = ScalarField::from_fn(&g, source);
        let load = op.load(&src.values, &|x, f| grad(x)[f.axis()] * f.sign());
        let (u, _) = op.solve(&load, &exact, 1e-12, 200_000)?;
        errs.push((0..g.len()).map(|i| (u.values[i] - exact(&g.point(i))).abs()).fold(0.0, f64::max));
    }
    Ok(errs)
}

pub fn c9_manufactured() -> Result<(bool, String)> {
    let f = |s: &str| Face::parse(s).expect("face label");
    let patterns: Vec<(Dim, Vec<Face>, [usize; 3])> = vec![
        (Dim::Two, vec![f("x-")], [33, 65, 129]),
        (Dim::Two, vec![f("x-"), f("y+")], [33, 65, 129]),
        (Dim::Three, vec![f("x-")], [17, 33, 65]),
    ];
    let mut ok = true;
    let mut msgs = Vec::new();
    for (dim, faces, grids) in patterns {
        let e = manufactured_errors(dim, &faces, &grids)?;
        let slope = (e[0] / e[2]).log2() / 2.0;
        let pass = slope >= MMS_SLOPE.0 && slope <= MMS_SLOPE.1;
        ok &= pass;
        let labels: Vec<&str> = faces.iter().map(|f| f.label()).collect();
        msgs.push(format!("d={} Γ={:?} slope {slope:.3}", dim.n(), labels));
    }
    Ok((ok, format!("{} (range {:?})", msgs.join("; "), MMS_SLOPE)))
}

pub fn c10_round_trip() -> Result<(bool, String)> {
    let eps = default_eps(1.0);
    let mut worst = 0.0f64;
    for (dim, n) in [(Dim::Two, 5), (Dim::Three, 5)] {
        let coeffs: Vec<f64> = (1..=n).map(|k| (k as f64 * 0.37).sin() * 3.0 + 0.1).collect();
        let entries = (1..=n)
            .map(|k| crate::expansion::LedgerEntry {
                k,
                scale: crate::expansion::ladder(dim, k, 2.5),
                coeff: coeffs[k - 1],
                breakdown: Default::default(),
            })
            .collect();
        let ledger = ExpansionLedger { cost: CostKind::H1, dim, order: n, route: Route::General, h: 0.0, entries };
        let y: Vec<f64> = eps.iter().map(|&e| ledger.evaluate(e)).collect();
        let scales: Vec<_> = ledger.entries.iter().map(|e| (e.k, e.scale)).collect();
        let ex = extract_coefficients(&eps, &y, &scales)?;
        for (a, b) in ex.coeffs.iter().zip(&coeffs) {
            worst = worst.max((a - b).abs() / b.abs());
        }
    }
    Ok((worst < ROUND_TRIP_TOL, format!("max rel error {worst:.2e} (tol {ROUND_TRIP_TOL})")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_configs_build() {
        for dim in [Dim::Two, Dim::Three] {
            for cost in [CostKind::H1, CostKind::L2] {
                let p = reference_problem(dim, cost, 33, 3);
                assert_eq!(p.dim, dim);
                assert_eq!(p.cost, cost);
            }
        }
    }

    #[test]
    fn cheap_criteria_pass() {
        for (name, r) in [("c1", c1_mean_value()), ("c10", c10_round_trip())] {
            let (ok, msg) = r.unwrap();
            assert!(ok, "{name}: {msg}");
        }
    }
}
