use thiserror::Error;

use crate::cone::ConeVerdict;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("singular system")]
    Singular,

    #[error("vector is not of unit length (norm {0})")]
    NotUnit(f64),

    #[error("Gram determinant {det:e} is negative beyond tolerance {bound:e}")]
    InconsistentGram { det: f64, bound: f64 },

    #[error("degenerate simplex: volume {volume:e} below threshold {threshold:e}")]
    DegenerateSimplex { volume: f64, threshold: f64 },

    #[error("failed to draw a non-degenerate simplex after {0} attempts")]
    SamplingFailure(usize),

    #[error("polytope is empty")]
    EmptyPolytope,

    #[error("polytope is unbounded")]
    UnboundedPolytope,

    #[error("origin is not an interior point")]
    OriginNotInterior,

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("halfspaces {0:?} (0-based) support no facet")]
    RedundantHalfspace(Vec<usize>),

    #[error("weights are not inside the volume cone: {0}")]
    ConeViolation(ConeVerdict),

    #[error("no admissible normal system after {0} restarts")]
    GenericityExhausted(usize),

    #[error("descent stalled at residual {0:e}")]
    NoProgress(f64),

    #[error("reconstruction did not converge after {iterations} iterations (max relative area error {max_rel_error:e})")]
    NoConvergence {
        iterations: usize,
        max_rel_error: f64,
        rel_errors: Vec<f64>,
    },

    #[error("invalid normal system: {0}")]
    InvalidSystem(String),
}
