use thiserror::Error;

/// Errors raised while building or analysing a moment system.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HmeError {
    /// A scalar or structural parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A moment state violates its invariants (non-positive density or temperature, wrong length).
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// The requested combination is valid in principle but not supported by this implementation.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An iterative eigensolver failed to converge. The payload carries a dump of the input.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Every root of a matrix pencil was classified as infinite.
    #[error("degenerate pencil: all {0} generalized eigenvalues are infinite")]
    DegeneratePencil(usize),
}

pub type Result<T, E = HmeError> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> HmeError {
    HmeError::InvalidParameter(msg.into())
}
