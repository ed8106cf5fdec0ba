use alloc::string::String;

use crate::Point;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate mesh box along axis {axis}")]
    DegenerateBox { axis: usize },

    #[error("refinement level {level} overflows the cell index type")]
    IndexOverflow { level: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("closest-point projection from {point:?} did not converge (|phi| = {residual:e})")]
    ProjectionFailure { point: Point, residual: f64 },

    #[error("surrogate face of cell {cell} belongs to an inactive cell")]
    InactiveSurrogateFace { cell: usize },

    #[error("diagonal block of cell {cell} is numerically singular")]
    SingularBlock { cell: usize },

    #[error("matrix is singular at pivot {pivot}")]
    Singular { pivot: usize },

    #[error("GMRES breakdown at iteration {iteration}")]
    Breakdown { iteration: usize },

    #[error("eigenvalue iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("no active cells on multigrid level {level}")]
    EmptyActiveSet { level: usize },

    #[error("coarse system of size {size} exceeds the direct-solve cap {cap}")]
    CoarseTooLarge { size: usize, cap: usize },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
