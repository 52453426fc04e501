use thiserror::Error;

/// Errors produced by every fallible operation in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not palindromic")]
    NotPalindromic,

    #[error("roots not in reciprocal pairs")]
    Unpairable,

    #[error("not in theorem domain: {0}")]
    NotInTheoremDomain(String),

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("dimension {dim} exceeds supported bound {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("no convergence after {0} sweeps")]
    NoConvergence(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
