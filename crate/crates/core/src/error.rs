use thiserror::Error;

use crate::report::Transcript;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("integerization with {bits} bits lost precision (shift {shift} exceeds scaled trace)")]
    PrecisionLoss { bits: u32, shift: String },

    #[error("lattice basis is rank deficient")]
    RankDeficient,

    #[error("quadratic form is not positive definite on the lattice")]
    NotPsd,

    #[error("vector is not a member of the lattice")]
    NotInLattice,

    #[error("enumeration too large: {0}")]
    TooLarge(String),

    #[error("point is not strictly interior: constraint {index} has slack {slack:e}")]
    InteriorViolation { index: usize, slack: f64 },

    #[error("polytope is unbounded or degenerate: {0}")]
    DegeneratePolytope(String),

    #[error("centering did not converge after {iterations} iterations (decrement {decrement:e})")]
    NonConvergence { iterations: usize, decrement: f64 },

    #[error("oracle inconsistency: {0}")]
    OracleInconsistency(String),

    #[error("malformed oracle: {0}")]
    MalformedOracle(String),

    #[error("hyperplane does not meet the ellipsoid (residual radius^2 = {residual:e})")]
    EmptySlice { residual: f64 },

    #[error("no integral point left in the final slab")]
    InfeasibleSlab,

    #[error("oracle accepted the non-integral point {point:?} and no integral point could be verified")]
    AmbiguousYes {
        point: Vec<f64>,
        /// Filled in by the top-level solve.
        transcript: Option<Box<Transcript>>,
    },

    #[error("no termination after {blocks} cutting plane blocks")]
    NonTermination {
        blocks: usize,
        transcript: Box<Transcript>,
    },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
