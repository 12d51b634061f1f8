use serde::Serialize;
use thiserror::Error;

/// One violated invariant in a validation report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub code: String,
    pub message: String,
}

impl Violation {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        Violation { code: code.to_string(), message: message.into() }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("kernel evaluated at the origin")]
    SingularPoint,
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("Taylor order {order} exceeds the supported maximum {max}")]
    OrderTooHigh { order: usize, max: usize },
    #[error("moment of degree {needed} requested but table holds up to {available}")]
    MomentTableTooSmall { needed: usize, available: usize },
    #[error("degenerate simplex with volume {0:e}")]
    DegenerateSimplex(f64),
    #[error("inclusion shape does not contain the origin with the required margin (distance {0:e})")]
    OriginNotInterior(f64),
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("quadrature did not converge: estimated error {estimate:e} at x = {x:?}")]
    QuadratureNonConvergence { estimate: f64, x: Vec<f64> },
    #[error("linear solver did not converge: residual {residual:e} after {iterations} iterations")]
    SolverNonConvergence { residual: f64, iterations: usize },
    #[error("inclusion reaches the domain boundary at eps = {0}")]
    InclusionTouchesBoundary(f64),
    #[error("point {0:?} lies outside the grid or too close to its boundary for the stencil")]
    StencilOutOfRange(Vec<f64>),
    #[error("rank-deficient fit: {0}")]
    RankDeficient(String),
    #[error("ill-conditioned design matrix: condition number {0:e}")]
    IllConditioned(f64),
    #[error("too few samples: {have} for {need} unknowns")]
    TooFewSamples { have: usize, need: usize },
    #[error("special-case route `{route}` does not apply: {reason}")]
    RouteNotApplicable { route: String, reason: String },
    #[error("configuration invalid ({} violations)", .0.len())]
    Validation(Vec<Violation>),
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SingularPoint => "singular_point",
            Error::UnsupportedDimension(_) => "unsupported_dimension",
            Error::OrderTooHigh { .. } => "order_too_high",
            Error::MomentTableTooSmall { .. } => "moment_table_too_small",
            Error::DegenerateSimplex(_) => "degenerate_simplex",
            Error::OriginNotInterior(_) => "origin_not_interior",
            Error::InvalidShape(_) => "invalid_shape",
            Error::QuadratureNonConvergence { .. } => "quadrature_non_convergence",
            Error::SolverNonConvergence { .. } => "solver_non_convergence",
            Error::InclusionTouchesBoundary(_) => "inclusion_touches_boundary",
            Error::StencilOutOfRange(_) => "stencil_out_of_range",
            Error::RankDeficient(_) => "rank_deficient",
            Error::IllConditioned(_) => "ill_conditioned",
            Error::TooFewSamples { .. } => "too_few_samples",
            Error::RouteNotApplicable { .. } => "route_not_applicable",
            Error::Validation(_) => "validation",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
