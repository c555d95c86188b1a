use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian: max asymmetry {max_asymmetry:e} exceeds {tolerance:e}")]
    NotHermitian { max_asymmetry: f64, tolerance: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {min_eigenvalue:e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{what}: N = {n} exceeds the limit of {limit}")]
    SizeLimit { what: &'static str, n: usize, limit: usize },

    #[error("representation mismatch: {left} vs {right}")]
    RepresentationMismatch { left: String, right: String },

    #[error("direction vector is not unit norm (|n| = {norm})")]
    NonUnitVector { norm: f64 },

    #[error("expected a pure state")]
    NotPure,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unphysical input: {0}")]
    Unphysical(String),

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
