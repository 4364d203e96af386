use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("quadrature did not converge: best estimate {estimate:e} with error bound {error_bound:e} after {evaluations} evaluations")]
    NonConvergence { estimate: f64, error_bound: f64, evaluations: usize },

    #[error("profile solver did not converge: residual {residual:e} after {iterations} Newton steps")]
    SolverStalled { residual: f64, iterations: usize },

    #[error("profile iterate lost strict monotonicity at node {node}")]
    MonotonicityLoss { node: usize },

    #[error("field is not C2 at x = {x}")]
    RegularityViolation { x: f64 },

    #[error("point lies on the boundary of the set (signed distance {distance:e})")]
    OnBoundary { distance: f64 },

    #[error("point lies on the medial set: nearest boundary point is not unique")]
    MedialSet,

    #[error("invalid boundary modification: {0}")]
    InvalidEta(String),

    #[error("fractional Laplacian of the indicator has the wrong sign at signed distance {distance:e}")]
    SignViolation { distance: f64 },

    #[error("integral diverges under refinement (last increment ratio {ratio:.3})")]
    DivergenceDetected { partial: f64, ratio: f64 },

    #[error("extrapolation residual {residual:.3e} exceeds the accepted threshold")]
    PoorFit { residual: f64 },

    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),
}

pub type Result<T> = std::result::Result<T, Error>;
