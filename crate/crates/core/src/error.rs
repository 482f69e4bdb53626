use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource guard: {0}")]
    Resource(String),

    #[error("unsupported dimension {got} (expected {expected})")]
    UnsupportedDimension { got: usize, expected: String },

    #[error("invalid stochastic matrix: column {} sums to {sum}", .column + 1)]
    ColumnSum { column: usize, sum: f64 },

    #[error("invalid stochastic matrix: entry ({}, {}) = {value} outside [0, 1]", .row + 1, .column + 1)]
    EntryOutOfRange { row: usize, column: usize, value: f64 },

    #[error("validation failed: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
