//! Volume potentials U^(k) = ∫_ω E(x-y) F^(k)(y) dy and
//! P^(k) = -α1 ∫_ω φ(x-y) F^(k)(y) dy.
//!
//! The ball is integrated in polar coordinates centred at the evaluation
//! point, so the kernel singularity is absorbed by the Jacobian and the ray
//! integrals are refined geometrically toward it. Simplicial shapes use plain
//! Gauss rules on far simplices and a signed cone decomposition with apex x
//! (Duffy coordinates) on near ones.

use crate::kernels::{biharmonic_radial, laplace_radial, Kernel};
use crate::moments::{det3, DataJet, Shape, Simplex};
use crate::poly::Poly;
use crate::quadrature::{graded_both, graded_toward_start, integrate_panels, mapped};
use crate::{Dim, Error, Result};
use std::f64::consts::PI;

/// Resolution knobs; `refined()` is used for a posteriori error estimates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadParams {
    /// Gauss points per panel.
    pub q: usize,
    /// Extra geometric refinement levels.
    pub extra_levels: usize,
}

impl Default for QuadParams {
    fn default() -> Self {
        QuadParams { q: 10, extra_levels: 0 }
    }
}

impl QuadParams {
    pub fn refined(self) -> Self {
        QuadParams { q: self.q + 6, extra_levels: self.extra_levels + 3 }
    }
}

/// Relative accuracy targets for the checked evaluators.
pub const U_REL_TOL: f64 = 1e-8;
pub const P_REL_TOL: f64 = 1e-7;

#[derive(Clone, Debug)]
pub struct Potential {
    pub shape: Shape,
    pub density: Poly,
    pub kernel: Kernel,
    /// 1 for U, -α1 for P.
    pub prefactor: f64,
    pub params: QuadParams,
    simplices: Vec<Simplex>,
}

impl Potential {
    pub fn new(shape: &Shape, density: Poly, kernel: Kernel, prefactor: f64) -> Self {
        Potential {
            simplices: shape.simplices(),
            shape: shape.clone(),
            density,
            kernel,
            prefactor,
            params: QuadParams::default(),
        }
    }

    /// U^(k).
    pub fn newton(shape: &Shape, jet: &DataJet, k: usize) -> Self {
        Self::new(shape, jet.f_polynomial(k), Kernel::Laplace, 1.0)
    }

    /// P^(k) for the L2 cost.
    pub fn biharmonic(shape: &Shape, jet: &DataJet, k: usize, alpha1: f64) -> Self {
        Self::new(shape, jet.f_polynomial(k), Kernel::Biharmonic, -alpha1)
    }

    pub fn dim(&self) -> Dim {
        self.shape.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.density.is_zero() || self.prefactor == 0.0
    }

    #[inline]
    fn radial(&self, s: f64) -> f64 {
        match self.kernel {
            Kernel::Laplace => laplace_radial(s, self.dim()),
            Kernel::Biharmonic => biharmonic_radial(s, self.dim()),
        }
    }

    fn singular(&self) -> bool {
        self.dim() == Dim::Two || self.kernel == Kernel::Laplace
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.eval_with(x, self.params)
    }

    /// Value together with the difference to a refined evaluation.
    pub fn eval_estimate(&self, x: &[f64]) -> (f64, f64) {
        let v = self.eval_with(x, self.params);
        let w = self.eval_with(x, self.params.refined());
        (w, (w - v).abs())
    }

    /// Evaluation that fails when the error estimate misses the target
    /// (1e-8 relative for U, 1e-7 for P, measured against max(|value|, |prefactor|·|ω|·‖F‖)).
    pub fn eval_checked(&self, x: &[f64]) -> Result<f64> {
        let (v, est) = self.eval_estimate(x);
        let tol = match self.kernel {
            Kernel::Laplace => U_REL_TOL,
            Kernel::Biharmonic => P_REL_TOL,
        };
        let scale = v.abs().max(self.prefactor.abs() * self.density_scale() * 1e-3);
        if est > tol * scale {
            return Err(Error::QuadratureNonConvergence { estimate: est / scale.max(1e-300), x: x.to_vec() });
        }
        Ok(v)
    }

    fn density_scale(&self) -> f64 {
        self.density.terms().map(|(_, c)| c.abs()).sum::<f64>()
    }

    pub fn eval_with(&self, x: &[f64], p: QuadParams) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let raw = match &self.shape {
            Shape::Ball { dim: Dim::Two } => self.ball2(x, p),
            Shape::Ball { dim: Dim::Three } => self.ball3(x, p),
            _ => self.simplicial(x, p),
        };
        self.prefactor * raw
    }

    /// ∫ over the ray segment [s0, s1] from x in direction u of K(s) F(x+su) s^{d-1} ds.
    fn ray(&self, x: &[f64], u: &[f64], s0: f64, s1: f64, p: QuadParams) -> f64 {
        let d = self.dim().n();
        let len = s1 - s0;
        if len <= 0.0 {
            return 0.0;
        }
        let mut y = [0.0; 3];
        let mut f = |s: f64| {
            for i in 0..d {
                y[i] = x[i] + s * u[i];
            }
            self.radial(s) * self.density.eval(&y) * s.powi(d as i32 - 1)
        };
        if !self.singular() || d == 3 {
            // polynomial in s up to the kernel factor s^{2-d}: exact Gauss
            let n = (self.density.degree() + 6) / 2 + 2 + p.q / 4;
            return integrate_panels(&[(s0, s1)], n, f);
        }
        let levels = if s0 <= 0.0 {
            12 + p.extra_levels
        } else {
            let ratio = len / s0;
            if ratio < 0.5 {
                0
            } else {
                (ratio.log2().ceil() as usize + 2 + p.extra_levels).min(40)
            }
        };
        integrate_panels(&graded_toward_start(s0, s1, levels), 8.max(p.q - 2), &mut f)
    }

    fn ball2(&self, x: &[f64], p: QuadParams) -> f64 {
        let a = x[0].hypot(x[1]);
        let th = if a > 0.0 { x[1].atan2(x[0]) } else { 0.0 };
        let n = p.q + 2;
        if a <= 1.0 {
            let gap = (1.0 - a * a).max(1e-300).sqrt();
            let lv = ((1.0 / gap).log2().ceil().max(0.0) as usize + p.extra_levels).min(30);
            let mut total = 0.0;
            for k in 0..4 {
                let t0 = -PI + k as f64 * PI / 2.0;
                for (lo, hi) in graded_both(t0, t0 + PI / 2.0, lv) {
                    for (t, w) in mapped(n, lo, hi) {
                        let ct = t.cos();
                        let rho = -a * ct + (a * a * ct * ct + 1.0 - a * a).max(0.0).sqrt();
                        let u = [(th + t).cos(), (th + t).sin()];
                        total += w * self.ray(x, &u, 0.0, rho, p);
                    }
                }
            }
            total
        } else {
            let sm = 1.0 / a;
            let lv = ((0.5 * (1.0 / (a - 1.0)).log2()).ceil().max(0.0) as usize + p.extra_levels).min(30);
            let mut total = 0.0;
            for (lo0, hi0) in [(-PI / 2.0, 0.0), (0.0, PI / 2.0)] {
                for (lo, hi) in graded_both(lo0, hi0, lv) {
                    for (xi, w) in mapped(n, lo, hi) {
                        let spsi = sm * xi.sin();
                        let psi = spsi.asin();
                        let cpsi = psi.cos();
                        let cx = xi.cos();
                        let jac = sm * cx / cpsi;
                        let u = [(th + PI + psi).cos(), (th + PI + psi).sin()];
                        let s0 = a * cpsi - cx;
                        let s1 = a * cpsi + cx;
                        total += w * jac * self.ray(x, &u, s0.max(0.0), s1, p);
                    }
                }
            }
            total
        }
    }

    fn ball3(&self, x: &[f64], p: QuadParams) -> f64 {
        let a = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let e1 = if a > 0.0 { [x[0] / a, x[1] / a, x[2] / a] } else { [0.0, 0.0, 1.0] };
        let (e2, e3) = orthonormal_complement(e1);
        let n = p.q + 2;
        let nphi = (2 * self.density.degree() + 6).max(8) + p.q / 2;
        let dir = |mu: f64, phi: f64, axis_sign: f64| {
            let st = (1.0 - mu * mu).max(0.0).sqrt();
            let (sp, cp) = phi.sin_cos();
            let mut u = [0.0; 3];
            for i in 0..3 {
                u[i] = axis_sign * mu * e1[i] + st * (cp * e2[i] + sp * e3[i]);
            }
            u
        };
        let mut total = 0.0;
        if a <= 1.0 {
            let gap = (1.0 - a * a).max(1e-300).sqrt();
            let lv = ((1.0 / gap).log2().ceil().max(0.0) as usize + p.extra_levels).min(30);
            for (lo0, hi0) in [(-1.0, 0.0), (0.0, 1.0)] {
                for (lo, hi) in graded_both(lo0, hi0, lv) {
                    for (mu, w) in mapped(n, lo, hi) {
                        let rho = -a * mu + (a * a * mu * mu + 1.0 - a * a).max(0.0).sqrt();
                        for j in 0..nphi {
                            let phi = 2.0 * PI * j as f64 / nphi as f64;
                            let u = dir(mu, phi, 1.0);
                            total += w * (2.0 * PI / nphi as f64) * self.ray(x, &u, 0.0, rho, p);
                        }
                    }
                }
            }
        } else {
            let sm = 1.0 / a;
            let lv = ((0.5 * (1.0 / (a - 1.0)).log2()).ceil().max(0.0) as usize + p.extra_levels).min(30);
            for (lo, hi) in graded_both(0.0, PI / 2.0, lv) {
                for (xi, w) in mapped(n, lo, hi) {
                    let spsi = sm * xi.sin();
                    let cpsi = (1.0 - spsi * spsi).sqrt();
                    let cx = xi.cos();
                    let jac = spsi * sm * cx / cpsi;
                    let s0 = a * cpsi - cx;
                    let s1 = a * cpsi + cx;
                    for j in 0..nphi {
                        let phi = 2.0 * PI * j as f64 / nphi as f64;
                        let u = dir(cpsi, phi, -1.0);
                        total += w * jac * (2.0 * PI / nphi as f64) * self.ray(x, &u, s0.max(0.0), s1, p);
                    }
                }
            }
        }
        total
    }

    fn kernel_at(&self, x: &[f64], y: &[f64]) -> f64 {
        let d = self.dim().n();
        let s = (0..d).map(|i| (x[i] - y[i]).powi(2)).sum::<f64>().sqrt();
        self.radial(s)
    }

    fn simplicial(&self, x: &[f64], p: QuadParams) -> f64 {
        let d = self.dim().n();
        let mut xp = [0.0; 3];
        xp[..d].copy_from_slice(&x[..d]);
        let mut total = 0.0;
        for s in &self.simplices {
            let c = s.centroid();
            let far = crate::moments::dist3(&c, &xp) > 2.0 * s.diameter();
            let sign = s.volume.signum();
            let g = |y: &[f64]| self.kernel_at(x, y) * self.density.eval(y);
            total += sign
                * if far { simplex_gauss(s, p.q, &g) } else { self.cone_rule(s, &xp, p) };
        }
        total
    }

    /// ∫_T K(x-y) F(y) dy as a signed sum of cones with apex x over the faces of T.
    fn cone_rule(&self, s: &Simplex, x: &[f64; 3], p: QuadParams) -> f64 {
        let d = s.dim();
        let n = p.q;
        let t_levels = if self.singular() { 12 + p.extra_levels } else { 0 };
        let t_panels = graded_toward_start(0.0, 1.0, t_levels);
        let mut total = 0.0;
        for opp in 0..=d {
            let face: Vec<[f64; 3]> = (0..=d).filter(|&i| i != opp).map(|i| s.verts[i]).collect();
            if d == 2 {
                let (b, c) = oriented_edge(&face, &s.verts[opp]);
                let det = (b[0] - x[0]) * (c[1] - x[1]) - (b[1] - x[1]) * (c[0] - x[0]);
                if det == 0.0 {
                    continue;
                }
                // grade toward the foot of x on the edge line when x is close to it
                let e = [c[0] - b[0], c[1] - b[1]];
                let len = e[0].hypot(e[1]);
                let h = det.abs() / len;
                let foot = (((x[0] - b[0]) * e[0] + (x[1] - b[1]) * e[1]) / (len * len)).clamp(0.0, 1.0);
                let lv = if h < 0.5 * len { ((len / h).log2().ceil() as usize + p.extra_levels).min(40) } else { 0 };
                let mut v_panels = Vec::new();
                if foot > 0.0 {
                    v_panels.extend(graded_both(0.0, foot, lv));
                }
                if foot < 1.0 {
                    v_panels.extend(graded_both(foot, 1.0, lv));
                }
                for &(v0, v1) in &v_panels {
                    for (v, wv) in mapped(n, v0, v1) {
                        let q = [b[0] + v * e[0], b[1] + v * e[1]];
                        let f = |t: f64| {
                            let y = [x[0] + t * (q[0] - x[0]), x[1] + t * (q[1] - x[1])];
                            self.kernel_at(x, &y) * self.density.eval(&y) * t
                        };
                        total += wv * det * integrate_panels(&t_panels, 8.max(n - 2), f);
                    }
                }
            } else {
                let (b, c, e) = oriented_face(&face, &s.verts[opp]);
                let sub = |u: [f64; 3], v: [f64; 3]| [u[0] - v[0], u[1] - v[1], u[2] - v[2]];
                let det = det3(sub(b, *x), sub(c, b), sub(e, c));
                if det == 0.0 {
                    continue;
                }
                for (v, wv) in mapped(n, 0.0, 1.0) {
                    for (w, ww) in mapped(n, 0.0, 1.0) {
                        let mut q = [0.0; 3];
                        for i in 0..3 {
                            q[i] = b[i] + v * (c[i] - b[i]) + v * w * (e[i] - c[i]);
                        }
                        let f = |t: f64| {
                            let y = [x[0] + t * (q[0] - x[0]), x[1] + t * (q[1] - x[1]), x[2] + t * (q[2] - x[2])];
                            self.kernel_at(x, &y) * self.density.eval(&y) * t * t
                        };
                        total += wv * ww * v * det * integrate_panels(&t_panels, 8.max(n - 2), f);
                    }
                }
            }
        }
        total
    }
}

/// Edge endpoints ordered so that the cone over the edge with apex at the
/// opposite vertex has positive orientation.
fn oriented_edge(face: &[[f64; 3]], opp: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let (b, c) = (face[0], face[1]);
    let det = (b[0] - opp[0]) * (c[1] - opp[1]) - (b[1] - opp[1]) * (c[0] - opp[0]);
    if det > 0.0 {
        (b, c)
    } else {
        (c, b)
    }
}

fn oriented_face(face: &[[f64; 3]], opp: &[f64; 3]) -> ([f64; 3], [f64; 3], [f64; 3]) {
    let (b, c, e) = (face[0], face[1], face[2]);
    let sub = |u: [f64; 3], v: [f64; 3]| [u[0] - v[0], u[1] - v[1], u[2] - v[2]];
    if det3(sub(b, *opp), sub(c, b), sub(e, c)) > 0.0 {
        (b, c, e)
    } else {
        (b, e, c)
    }
}

fn orthonormal_complement(e1: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let t = if e1[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let dot = t[0] * e1[0] + t[1] * e1[1] + t[2] * e1[2];
    let mut e2 = [t[0] - dot * e1[0], t[1] - dot * e1[1], t[2] - dot * e1[2]];
    let n = (e2[0] * e2[0] + e2[1] * e2[1] + e2[2] * e2[2]).sqrt();
    for v in &mut e2 {
        *v /= n;
    }
    let e3 = [
        e1[1] * e2[2] - e1[2] * e2[1],
        e1[2] * e2[0] - e1[0] * e2[2],
        e1[0] * e2[1] - e1[1] * e2[0],
    ];
    (e2, e3)
}

/// Collapsed-coordinate Gauss rule over a simplex (unsigned volume).
pub fn simplex_gauss<G: Fn(&[f64]) -> f64>(s: &Simplex, n: usize, g: &G) -> f64 {
    let v = &s.verts;
    let vol = s.volume.abs();
    let mut total = 0.0;
    match s.dim() {
        2 => {
            for (u, wu) in mapped(n, 0.0, 1.0) {
                for (w, ww) in mapped(n, 0.0, 1.0) {
                    let mut y = [0.0; 3];
                    for i in 0..2 {
                        y[i] = v[0][i] + u * (v[1][i] - v[0][i]) + u * w * (v[2][i] - v[1][i]);
                    }
                    total += wu * ww * u * g(&y);
                }
            }
            total * 2.0 * vol
        }
        _ => {
            for (u, wu) in mapped(n, 0.0, 1.0) {
                for (t, wt) in mapped(n, 0.0, 1.0) {
                    for (w, ww) in mapped(n, 0.0, 1.0) {
                        let mut y = [0.0; 3];
                        for i in 0..3 {
                            y[i] = v[0][i]
                                + u * (v[1][i] - v[0][i])
                                + u * t * (v[2][i] - v[1][i])
                                + u * t * w * (v[3][i] - v[2][i]);
                        }
                        total += wu * wt * ww * u * u * t * g(&y);
                    }
                }
            }
            total * 6.0 * vol
        }
    }
}

/// ∫_ω g dx for smooth g (polar Gauss on the ball, collapsed Gauss on simplices).
pub fn integrate_over_shape<G: Fn(&[f64]) -> f64>(shape: &Shape, n: usize, g: G) -> f64 {
    match shape {
        Shape::Ball { dim: Dim::Two } => {
            let nth = 2 * n + 4;
            let mut s = 0.0;
            for (r, wr) in mapped(n, 0.0, 1.0) {
                for j in 0..nth {
                    let t = 2.0 * PI * j as f64 / nth as f64;
                    s += wr * r * (2.0 * PI / nth as f64) * g(&[r * t.cos(), r * t.sin()]);
                }
            }
            s
        }
        Shape::Ball { dim: Dim::Three } => {
            let nphi = 2 * n + 4;
            let mut s = 0.0;
            for (r, wr) in mapped(n, 0.0, 1.0) {
                for (mu, wm) in mapped(n, -1.0, 1.0) {
                    let st = (1.0 - mu * mu).sqrt();
                    for j in 0..nphi {
                        let t = 2.0 * PI * j as f64 / nphi as f64;
                        let y = [r * st * t.cos(), r * st * t.sin(), r * mu];
                        s += wr * r * r * wm * (2.0 * PI / nphi as f64) * g(&y);
                    }
                }
            }
            s
        }
        _ => shape.simplices().iter().map(|s| s.volume.signum() * simplex_gauss(s, n, &g)).sum(),
    }
}

/// Closed form of U^(2) for the unit ball and constant data with jump f1 - f2.
pub fn ball_u2_closed(x: &[f64], dim: Dim, jump: f64) -> f64 {
    let r2: f64 = x[..dim.n()].iter().map(|v| v * v).sum();
    match dim {
        Dim::Two => {
            if r2 <= 1.0 {
                -jump * (r2 - 1.0) / 4.0
            } else {
                -jump * r2.sqrt().ln() / 2.0
            }
        }
        Dim::Three => {
            if r2 <= 1.0 {
                -jump * (r2 - 3.0) / 6.0
            } else {
                jump / (3.0 * r2.sqrt())
            }
        }
    }
}

/// Gradient of [`ball_u2_closed`].
pub fn ball_u2_closed_grad(x: &[f64], dim: Dim, jump: f64) -> Vec<f64> {
    let d = dim.n();
    let r2: f64 = x[..d].iter().map(|v| v * v).sum();
    let f = match dim {
        Dim::Two => {
            if r2 <= 1.0 {
                -jump / 2.0
            } else {
                -jump / (2.0 * r2)
            }
        }
        Dim::Three => {
            if r2 <= 1.0 {
                -jump / 3.0
            } else {
                -jump / (3.0 * r2 * r2.sqrt())
            }
        }
    };
    x[..d].iter().map(|v| f * v).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_density(dim: usize) -> Poly {
        Poly::constant(dim, 1.0)
    }

    #[test]
    fn ball_u2_matches_closed_form() {
        for dim in [Dim::Two, Dim::Three] {
            let pot = Potential::new(&Shape::unit_ball(dim), unit_density(dim.n()), Kernel::Laplace, 1.0);
            for &r in &[0.0, 0.3, 0.7, 0.95, 0.999, 1.0, 1.001, 1.05, 1.5, 3.0] {
                let x = [r * 0.6, r * 0.8, 0.0];
                let v = pot.eval(&x);
                let c = ball_u2_closed(&x, dim, 1.0);
                assert!((v - c).abs() < 1e-10 * c.abs().max(1.0), "dim {dim:?} r {r}: {v} vs {c}");
            }
        }
    }

    #[test]
    fn square_potential_against_cone_identities() {
        // K ≡ const integrates to the area through the signed cones
        let sq = Shape::Polygon { vertices: vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]] };
        let pot = Potential::new(&sq, unit_density(2), Kernel::Laplace, 1.0);
        // symmetric points give equal values
        let a = pot.eval(&[0.3, 0.1]);
        let b = pot.eval(&[-0.1, -0.3]);
        assert!((a - b).abs() < 1e-10, "{a} {b}");
        // far field: mean-value type comparison with dense Gauss
        let far = pot.eval(&[5.0, 1.0]);
        let dense = integrate_over_shape(&sq, 30, |y| laplace_radial(((5.0 - y[0]).powi(2) + (1.0 - y[1]).powi(2)).sqrt(), Dim::Two));
        assert!((far - dense).abs() < 1e-10, "{far} {dense}");
    }
}
