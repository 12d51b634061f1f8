//! TOML run configuration and its validation.
//!
//! ```toml
//! dim = 2
//! cost = "H1"
//! alpha2 = 1.0
//! x0 = [0.5, 0.5]
//! order = 5
//!
//! [domain]
//! lo = [0.0, 0.0]
//! hi = [1.0, 1.0]
//! nodes = 257
//! dirichlet = ["x-"]
//!
//! [shape]
//! kind = "ball"
//!
//! [data]
//! f1 = [[3.0, [0, 0]]]
//! f2 = [[1.0, [0, 0]]]
//! u_star = [[1.0, [2, 0]], [0.5, [0, 1]]]
//! ```

use crate::error::Violation;
use crate::fields::{Face, GridSpec};
use crate::moments::{Shape, ORIGIN_MARGIN};
use crate::poly::{Exps, Poly};
use crate::problem::{BaselineBox, H1Quadrature, Problem};
use crate::{CostKind, Dim, Error, Result};
use serde::{Deserialize, Serialize};

/// Polynomial as a list of `[coefficient, [exponents...]]` pairs.
pub type PolyTable = Vec<(f64, Vec<u32>)>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    /// Faces carrying Dirichlet data: any of "x-", "x+", "y-", "y+", "z-", "z+".
    pub dirichlet: Vec<String>,
    /// Optional baseline Ω (axis-aligned box where the source is f1).
    pub omega: Option<BoxConfig>,
}

fn default_nodes() -> usize {
    257
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxConfig {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeConfig {
    Ball,
    Polygon { vertices: Vec<[f64; 2]> },
    TetMesh { vertices: Vec<[f64; 3]>, tets: Vec<[usize; 4]> },
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    #[serde(default)]
    pub f1: PolyTable,
    #[serde(default)]
    pub f2: PolyTable,
    #[serde(default)]
    pub u_star: PolyTable,
    /// Dirichlet data on Γ.
    #[serde(default)]
    pub u_d: PolyTable,
    /// Outward normal derivative on Σ.
    #[serde(default)]
    pub u_n: PolyTable,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub h1_quadrature: H1Quadrature,
}

fn default_tol() -> f64 {
    1e-10
}

fn default_max_iter() -> usize {
    200_000
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { tol: default_tol(), max_iter: default_max_iter(), h1_quadrature: H1Quadrature::default() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dim: usize,
    #[serde(default = "default_cost")]
    pub cost: CostKind,
    #[serde(default)]
    pub alpha1: f64,
    #[serde(default)]
    pub alpha2: f64,
    pub x0: Vec<f64>,
    /// Number of expansion terms N.
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    /// Inclusion sizes for sweeps; defaults to a half-octave ladder.
    #[serde(default)]
    pub eps: Vec<f64>,
    pub domain: DomainConfig,
    pub shape: ShapeConfig,
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default)]
    pub solver: SolverConfig,
}

fn default_cost() -> CostKind {
    CostKind::H1
}

fn default_order() -> usize {
    5
}

fn default_n_max() -> usize {
    8
}

/// Largest supported expansion length per dimension.
pub fn max_order(dim: Dim) -> usize {
    match dim {
        Dim::Two => 9,
        Dim::Three => 7,
    }
}

/// 2^{-3 - i/2} · L for i = 0..8, with L the shortest side of the domain.
pub fn default_eps(side: f64) -> Vec<f64> {
    (0..9).map(|i| side * 2f64.powf(-3.0 - 0.5 * i as f64)).collect()
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    fn poly(&self, name: &str, t: &PolyTable, v: &mut Vec<Violation>) -> Option<Poly> {
        let d = self.dim;
        if !(2..=3).contains(&d) {
            return None;
        }
        let mut p = Poly::zero(d);
        for (c, e) in t {
            if e.len() != d {
                v.push(Violation::new("poly_arity", format!("{name}: exponent list {e:?} must have {d} entries")));
                return None;
            }
            if !c.is_finite() {
                v.push(Violation::new("poly_coefficient", format!("{name}: non-finite coefficient")));
                return None;
            }
            let mut ex: Exps = [0; 3];
            for (i, &x) in e.iter().enumerate() {
                if x > 40 {
                    v.push(Violation::new("poly_degree", format!("{name}: exponent {x} too large")));
                    return None;
                }
                ex[i] = x as u8;
            }
            p.add_term(ex, *c);
        }
        if p.degree() > self.n_max {
            v.push(Violation::new(
                "poly_degree",
                format!("{name}: degree {} exceeds n_max = {}", p.degree(), self.n_max),
            ));
        }
        Some(p)
    }

    /// Validate every invariant and build the runtime problem; all violations
    /// are reported together.
    pub fn build(&self) -> Result<Problem> {
        let mut v = Vec::new();
        let dim = Dim::try_from(self.dim).ok();
        if dim.is_none() {
            v.push(Violation::new("dim", format!("dim must be 2 or 3, got {}", self.dim)));
        }
        let d = self.dim;
        let dom = &self.domain;
        if dom.lo.len() != d || dom.hi.len() != d {
            v.push(Violation::new("domain_arity", format!("domain lo/hi must have {d} entries")));
        } else if dom.lo.iter().zip(&dom.hi).any(|(a, b)| !(a < b)) {
            v.push(Violation::new("domain_box", "domain requires lo < hi on every axis"));
        }
        if dom.nodes < 9 {
            v.push(Violation::new("grid_nodes", format!("nodes per axis must be at least 9, got {}", dom.nodes)));
        }
        let mut dirichlet = [false; 6];
        for name in &dom.dirichlet {
            match Face::parse(name) {
                Some(f) if f.axis() < d => dirichlet[f.0] = true,
                _ => v.push(Violation::new("dirichlet_face", format!("unknown face {name:?}"))),
            }
        }
        if !dirichlet.iter().any(|&b| b) {
            v.push(Violation::new("gamma_empty", "at least one face must carry Dirichlet data (|Γ| > 0)"));
        }
        if self.n_max > 12 {
            v.push(Violation::new("n_max", format!("n_max must be at most 12, got {}", self.n_max)));
        }
        if self.alpha1 < 0.0 || self.alpha2 < 0.0 || !self.alpha1.is_finite() || !self.alpha2.is_finite() {
            v.push(Violation::new("alpha", "alpha1 and alpha2 must be finite and non-negative"));
        }
        match self.cost {
            CostKind::L2 if self.alpha1 == 0.0 => {
                v.push(Violation::new("alpha", "cost L2 requires alpha1 > 0"));
            }
            CostKind::H1 if self.alpha2 == 0.0 => {
                v.push(Violation::new("alpha", "cost H1 requires alpha2 > 0"));
            }
            _ => {}
        }
        if let Some(dim) = dim {
            if self.order == 0 || self.order > max_order(dim) {
                v.push(Violation::new(
                    "order",
                    format!("order must be in 1..={}, got {}", max_order(dim), self.order),
                ));
            }
        }
        let shape = match (&self.shape, dim) {
            (ShapeConfig::Ball, Some(dim)) => Some(Shape::Ball { dim }),
            (ShapeConfig::Polygon { vertices }, Some(Dim::Two)) => Some(Shape::Polygon { vertices: vertices.clone() }),
            (ShapeConfig::TetMesh { vertices, tets }, Some(Dim::Three)) => {
                Some(Shape::TetMesh { vertices: vertices.clone(), tets: tets.clone() })
            }
            (_, Some(_)) => {
                v.push(Violation::new("shape_dim", "polygon shapes need dim = 2 and tet meshes dim = 3"));
                None
            }
            _ => None,
        };
        if let Some(s) = &shape {
            match s.validate() {
                Ok(()) => {}
                Err(Error::OriginNotInterior(dist)) => v.push(Violation::new(
                    "shape_origin",
                    format!("shape must contain the origin with margin {ORIGIN_MARGIN:e} (distance {dist:e})"),
                )),
                Err(e) => v.push(Violation::new("shape", e.to_string())),
            }
        }
        let f1 = self.poly("f1", &self.data.f1, &mut v);
        let f2 = self.poly("f2", &self.data.f2, &mut v);
        let u_star = self.poly("u_star", &self.data.u_star, &mut v);
        let u_d = self.poly("u_d", &self.data.u_d, &mut v);
        let u_n = self.poly("u_n", &self.data.u_n, &mut v);

        let mut grid = None;
        if let (Some(dim), true) = (dim, dom.lo.len() == d && dom.hi.len() == d) {
            let g = GridSpec::new(dim, &dom.lo, &dom.hi, dom.nodes.max(2), dirichlet);
            if self.x0.len() != d {
                v.push(Violation::new("x0_arity", format!("x0 must have {d} entries")));
            } else {
                let bd = g.boundary_distance(&self.x0);
                if bd < 0.2 * g.diameter() {
                    v.push(Violation::new(
                        "x0_margin",
                        format!("x0 must be at least 0.2·diam(D) = {:.6} from ∂D (distance {bd:.6})", 0.2 * g.diameter()),
                    ));
                }
                if bd < 5.0 * g.h_max() {
                    v.push(Violation::new("x0_cells", "x0 must be at least 5 grid cells from ∂D"));
                }
                if let Some(s) = &shape {
                    let eps = self.eps_list(&g);
                    for &e in &eps {
                        if !(e > 0.0) {
                            v.push(Violation::new("eps", format!("eps values must be positive, got {e}")));
                        } else if e * s.radius() >= bd {
                            v.push(Violation::new("eps_fit", format!("inclusion of size eps = {e} reaches ∂D")));
                        }
                    }
                    if let Some(b) = &dom.omega {
                        let inside = (0..d).all(|a| self.x0[a] >= b.lo[a] && self.x0[a] <= b.hi[a]);
                        if inside {
                            v.push(Violation::new("x0_in_omega", "x0 must lie outside the closure of Ω"));
                        }
                        let gap = (0..d)
                            .map(|a| (b.lo[a] - self.x0[a]).max(self.x0[a] - b.hi[a]).max(0.0))
                            .fold(0.0f64, |m, x| m.max(x));
                        if let Some(&emax) = eps.iter().reduce(|a, b| if a > b { a } else { b }) {
                            if !inside && emax * s.radius() >= gap {
                                v.push(Violation::new("eps_omega", "largest inclusion intersects Ω"));
                            }
                        }
                    }
                }
            }
            grid = Some(g);
        }
        if let Some(b) = &dom.omega {
            if b.lo.len() != d || b.hi.len() != d {
                v.push(Violation::new("omega_arity", format!("omega lo/hi must have {d} entries")));
            }
        }
        if !(self.solver.tol > 0.0 && self.solver.tol < 1e-2) {
            v.push(Violation::new("solver_tol", "solver tolerance must be in (0, 1e-2)"));
        }
        if !v.is_empty() {
            return Err(Error::Validation(v));
        }
        let grid = grid.expect("validated");
        let eps = self.eps_list(&grid);
        Ok(Problem {
            dim: dim.expect("validated"),
            grid,
            shape: shape.expect("validated"),
            x0: self.x0.clone(),
            f1: f1.expect("validated"),
            f2: f2.expect("validated"),
            u_star: u_star.expect("validated"),
            u_d: u_d.expect("validated"),
            u_n: u_n.expect("validated"),
            alpha1: self.alpha1,
            alpha2: self.alpha2,
            cost: self.cost,
            order: self.order,
            n_max: self.n_max,
            eps,
            omega: dom.omega.as_ref().map(|b| BaselineBox { lo: b.lo.clone(), hi: b.hi.clone() }),
            tol: self.solver.tol,
            max_iter: self.solver.max_iter,
            h1_quadrature: self.solver.h1_quadrature,
        })
    }

    fn eps_list(&self, g: &GridSpec) -> Vec<f64> {
        if self.eps.is_empty() {
            let side = (0..g.dim.n()).map(|a| g.hi[a] - g.lo[a]).fold(f64::INFINITY, f64::min);
            default_eps(side)
        } else {
            self.eps.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
dim = 2
cost = "H1"
alpha2 = 1.0
x0 = [0.5, 0.5]
[domain]
lo = [0.0, 0.0]
hi = [1.0, 1.0]
nodes = 65
dirichlet = ["x-"]
[shape]
kind = "ball"
[data]
f1 = [[3.0, [0, 0]]]
f2 = [[1.0, [0, 0]]]
u_star = [[1.0, [2, 0]]]
"#;

    #[test]
    fn parses_and_builds() {
        let cfg = RunConfig::from_toml(BASE).unwrap();
        let p = cfg.build().unwrap();
        assert_eq!(p.grid.n[0], 65);
        assert_eq!(p.eps.len(), 9);
        assert_eq!(p.f1.eval(&[0.1, 0.2]), 3.0);
    }

    #[test]
    fn reports_every_violation() {
        let text = BASE
            .replace("x0 = [0.5, 0.5]", "x0 = [0.05, 0.5]")
            .replace("dirichlet = [\"x-\"]", "dirichlet = []")
            .replace("alpha2 = 1.0", "alpha2 = 0.0");
        let err = RunConfig::from_toml(&text).unwrap().build().unwrap_err();
        let Error::Validation(v) = err else { panic!("expected validation error") };
        let codes: Vec<&str> = v.iter().map(|x| x.code.as_str()).collect();
        for c in ["gamma_empty", "alpha", "x0_margin", "eps_fit"] {
            assert!(codes.contains(&c), "missing {c} in {codes:?}");
        }
    }
}
