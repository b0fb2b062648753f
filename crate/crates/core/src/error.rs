use thiserror::Error;

/// Errors produced by the map engine and its pipeline.
#[derive(Debug, Error)]
pub enum SomError {
    /// An argument violated an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// Bad request from the caller, such as an unknown format tag.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("empty input: {0}")]
    Empty(String),

    /// CSV parse failure with 1-based row and column.
    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    /// Row whose field count disagrees with the first row.
    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    /// A persisted artifact could not be decoded.
    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl SomError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        SomError::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, SomError>;
