use thiserror::Error;

/// Errors across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("coordinate {coord} of point {index} is negative or non-finite ({value})")]
    InvalidCoordinate {
        index: usize,
        coord: usize,
        value: f64,
    },

    #[error("duplicate point id {id}")]
    DuplicateId { id: usize },

    #[error("empty point set")]
    EmptyPointSet,

    #[error("preference must have non-negative, finite components, not all zero")]
    InvalidPreference,

    #[error("k = {k} out of range 1..={n}")]
    InvalidK { k: usize, n: usize },

    #[error("id {id} is not in the ground set")]
    NotSubset { id: usize },

    #[error("{n} points exceed the exact-3d candidate cap of {cap}; use the grid oracle instead")]
    TooManyPoints { n: usize, cap: usize },

    #[error("coordinate {coord} is zero across all points; scaling is undefined")]
    DegenerateCoordinate { coord: usize },

    #[error("range {index} is empty")]
    EmptyRange { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("csv row {row}, column {column}: {message}")]
    Csv {
        row: usize,
        column: String,
        message: String,
    },

    #[error("column {name} has no usable values")]
    EmptyColumn { name: String },

    #[error("rejection sampling exceeded {limit} attempts; sigma may be too large")]
    RejectionLimit { limit: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
