use thiserror::Error;

/// Errors produced by signal generation, matrix construction and recovery.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain the operation is defined on.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Sample times were not strictly increasing.
    #[error("sample times not strictly increasing at index {index} ({prev} >= {next})")]
    Ordering { index: usize, prev: f64, next: f64 },

    #[error("length mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// The least-squares system restricted to the selected support is rank deficient.
    #[error("least-squares system is singular on support {support:?}")]
    SingularSystem { support: Vec<usize> },

    /// More atoms were requested than there are measurements.
    #[error("support of size {selected} exceeds the {measurements} available measurements")]
    OverSelection {
        selected: usize,
        measurements: usize,
    },

    /// The descent loop could not find a decreasing step.
    #[error(
        "gradient descent found no decreasing step; objective history has {history_len} entries"
    )]
    NonConvergence { history_len: usize },

    /// The reference signal has zero norm, so a relative error is undefined.
    #[error("reference signal has zero norm")]
    UndefinedReference,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
