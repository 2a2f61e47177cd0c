use thiserror::Error;

use crate::trace::RunTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point must have at least one coordinate")]
    EmptyPoint,
    #[error("coordinate {coordinate} is not finite")]
    NonFinite { coordinate: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("component index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid objective: {0}")]
    InvalidObjective(String),
    #[error(
        "reference solver hit the iteration cap ({iterations}) with gradient norm {grad_norm:e}"
    )]
    CapExceeded { iterations: usize, grad_norm: f64 },
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("csv row {row}: {message}")]
    Csv { row: usize, message: String },
    #[error("input contains no samples")]
    EmptyInput,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Failure of a solver run.
#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Invalid(#[from] Error),
    /// A non-finite iterate appeared. `partial` holds every epoch that
    /// completed before the failure.
    #[error("diverged in epoch {epoch}: {diagnostic}")]
    Diverged {
        epoch: usize,
        diagnostic: String,
        partial: Box<RunTrace>,
    },
}
