//! Error type shared by all solvers.

/// Errors reported by the estimation routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed data: non-finite entries, wrong shapes, asymmetry beyond tolerance.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A parameter outside its admissible range (e.g. a condition bound below 1).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Operands whose dimensions do not agree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Numerical failure: no finite minimizer, non-convergence, line-search underflow.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
