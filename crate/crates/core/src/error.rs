use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dimension mismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    DimensionMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("invalid segment: {0}")]
    InvalidSegment(String),

    #[error("segmentation does not match its row: {0}")]
    RowMismatch(String),

    #[error("instance exceeds solver limits: {0}")]
    LimitsExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;
