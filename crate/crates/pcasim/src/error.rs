//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {0}")]
    FileNotFound(String),

    #[error("parse error at row {row}, column {col}: {message}")]
    ParseError {
        row: usize,
        col: usize,
        message: String,
    },

    #[error("categorical column rejected: {0}")]
    CategoricalRejected(String),

    #[error("too few rows: got {got}, need at least {need}")]
    TooFewRows { got: usize, need: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("matrix is not symmetric (max asymmetry {max_asym:e})")]
    NotSymmetric { max_asym: f64 },

    #[error("data is not centered: column {col} has mean {mean:e}")]
    NotCentered { col: usize, mean: f64 },

    #[error("eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),

    #[error("matrix is not orthogonal (max deviation {max_dev:e})")]
    NotOrthogonal { max_dev: f64 },

    #[error("covariance is not positive semi-definite (eigenvalue {eigenvalue:e})")]
    NotPositiveSemiDefinite { eigenvalue: f64 },

    #[error("degenerate data: total variance is zero")]
    DegenerateData,

    #[error("invalid component count {p} for dimension {d}")]
    InvalidP { p: usize, d: usize },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("spectrum is not sorted in descending order at position {0}")]
    NotDescending(usize),

    #[error("not a unit vector: norm is {0}")]
    NotUnitVector(f64),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("all features selected: the complement set is empty")]
    EmptyComplement,

    #[error("invalid experiment grid: {0}")]
    InvalidGrid(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors raised inside numerical computation, as opposed to
    /// errors detectable from the inputs alone. The CLI maps the former to
    /// exit code 3 and the latter to exit code 2.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence(_)
                | Error::DegenerateData
                | Error::NotCentered { .. }
                | Error::NotPositiveSemiDefinite { .. }
        )
    }
}
