use thiserror::Error;

/// Errors raised by the matrix kernel, basis construction, map conversions and classification.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    ShapeMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: map acts on {expected}x{expected} matrices, got {got}x{got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid group table: {0}")]
    InvalidGroup(String),

    #[error("not a nice error basis: {0}")]
    NotNiceErrorBasis(String),

    #[error("operation requires a Weyl basis")]
    NotWeylBasis,

    #[error("coefficient matrices are expressed in different bases")]
    BasisMismatch,

    #[error(
        "coefficient matrix is not positive semi-definite (min eigenvalue {min_eigenvalue:e})"
    )]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("map is not Hermiticity-preserving (max deviation {deviation:e})")]
    NotHermiticityPreserving { deviation: f64 },

    #[error("map failed the linearity spot check (deviation {deviation:e})")]
    NotLinear { deviation: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
