use thiserror::Error;

/// Errors raised by the multiresolution transforms, solvers and driver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MrError {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("grid with {cells} cells is not a valid dyadic level (need an even, positive cell count)")]
    NotDyadic { cells: usize },

    #[error("prediction degree {degree} needs at least {degree} coarse cells, got {cells}")]
    UnsupportedGrid { cells: usize, degree: usize },

    #[error("unsupported prediction degree {0} (expected 1, 3 or 5)")]
    InvalidDegree(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not positive definite (pivot {index} = {pivot:e})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("quadratic reduction unavailable: {0}")]
    OracleUnavailable(String),
}

pub type Result<T> = std::result::Result<T, MrError>;
