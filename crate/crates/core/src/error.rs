use thiserror::Error;

/// Errors raised by code construction, decoding and simulation.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// Exhaustive search was requested on a code that is too large.
    #[error("brute-force search over 2^{k} codewords refused (limit 2^{limit})")]
    TooLarge { k: usize, limit: usize },

    #[error("integer overflow computing {0}")]
    Overflow(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
