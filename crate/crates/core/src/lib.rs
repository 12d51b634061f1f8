//! Higher-order topological derivatives of L2 and H1 tracking costs for a
//! Poisson problem whose right-hand side switches from `f2` to `f1` inside a
//! small inclusion `x0 + eps*omega`.
//!
//! Layers, bottom up: [`kernels`] and [`moments`] give the symbolic far-field
//! terms, [`potentials`] evaluates the volume potentials, [`fields`] and
//! [`solver`] provide grid functions and the mixed Dirichlet/Neumann Poisson
//! solves, [`expansion`] assembles the coefficient ledger and [`verify`]
//! checks it against direct perturbed solves.

pub mod config;
pub mod error;
pub mod expansion;
pub mod fields;
pub mod json;
pub mod kernels;
pub mod moments;
pub mod poly;
pub mod potentials;
pub mod problem;
pub mod quadrature;
pub mod selftest;
pub mod solver;
pub mod verify;

pub use error::{Error, Result, Violation};
pub use poly::Poly;

/// Spatial dimension of the problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub enum Dim {
    Two,
    Three,
}

impl Dim {
    pub fn n(self) -> usize {
        match self {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }
}

impl TryFrom<usize> for Dim {
    type Error = Error;
    fn try_from(d: usize) -> Result<Self> {
        match d {
            2 => Ok(Dim::Two),
            3 => Ok(Dim::Three),
            _ => Err(Error::UnsupportedDimension(d)),
        }
    }
}

impl From<Dim> for usize {
    fn from(d: Dim) -> usize {
        d.n()
    }
}

/// Which tracking functional is differentiated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum CostKind {
    /// alpha1 * ||u - u*||^2 in L2
    L2,
    /// alpha2 * ||grad(u - u*)||^2 in L2
    H1,
}

/// Worker count from TOPODERIV_THREADS, if set.
pub fn thread_cap() -> Option<usize> {
    std::env::var("TOPODERIV_THREADS").ok().and_then(|s| s.trim().parse().ok()).filter(|&n| n > 0)
}
