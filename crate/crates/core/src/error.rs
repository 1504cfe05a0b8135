use thiserror::Error;

/// Errors raised by instance construction, verification and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("underflow: {0}")]
    Underflow(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("intervals {left} and {right} overlap: {detail}")]
    Overlap {
        left: usize,
        right: usize,
        detail: String,
    },

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("unsupported query: {0}")]
    UnsupportedQuery(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("linear program failed: {0}")]
    LinearProgram(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
