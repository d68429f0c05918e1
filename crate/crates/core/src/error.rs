use thiserror::Error;

/// Errors raised by the laboratory.
///
/// `Falsification` is special: it means a computed quantity contradicts a
/// property the model is supposed to satisfy (a negative Gram eigenvalue, a
/// nonzero Gaussian part). Callers surface it as a failing run rather than a
/// usage problem.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("precision of {0} bits is below the 64-bit minimum")]
    Precision(u32),

    #[error("tolerances must satisfy tol_rank > tol_residual > 0")]
    Tolerance,

    #[error("q must lie in the open interval (0, 1), got {0}")]
    QOutOfRange(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-terminating series rejected: {0}")]
    NonTerminating(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("{0}; raise precision_bits")]
    NeedsPrecision(String),

    #[error("falsification event: {0}")]
    Falsification(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
