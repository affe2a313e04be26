use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A point's dimension does not match the kernel or measure it is used with.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A dense decomposition (eigen, SVD, Cholesky) could not be completed.
    #[error("decomposition failed: {0}")]
    Decomposition(String),

    /// The regularized normal equations are numerically singular.
    #[error("linear system is singular or not positive definite")]
    SingularSystem,

    /// A fixed-point iteration did not converge within the step budget.
    #[error("fixed-point iteration did not converge within {0} steps")]
    NoConvergence(usize),

    /// The iteration oscillates between two truncation orders without settling.
    #[error("truncation-order iteration oscillates between N={lo} and N={hi}")]
    FixedPointOscillation { lo: usize, hi: usize },

    /// A finite eigenvalue table is too short to answer the query.
    #[error("eigenvalue table exhausted: {0}")]
    TableExhausted(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
