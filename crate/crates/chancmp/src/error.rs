use thiserror::Error;

use crate::conic::Status;

/// Errors reported by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("unknown system label `{0}`")]
    UnknownLabel(String),

    #[error("invalid system layout: {0}")]
    Layout(String),

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("invalid input: {0}")]
    Domain(String),

    #[error("solver stopped with status {status:?} after {iterations} iterations")]
    Solver { status: Status, iterations: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed document: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
