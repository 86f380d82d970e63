use thiserror::Error;

/// Errors raised by the spectral kernel and the harnesses built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix must have at least one row and column")]
    Empty,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian: |A[{row},{col}] - conj(A[{col},{row}])| = {gap:e}")]
    NotHermitian { row: usize, col: usize, gap: f64 },

    #[error(
        "Jacobi eigensolver did not converge after {rotations} rotations \
         (off-diagonal residual {off_diagonal:e}, target {target:e})"
    )]
    NoConvergence {
        rotations: usize,
        off_diagonal: f64,
        target: f64,
    },

    #[error(
        "matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:e} below -{slack:e}"
    )]
    NotPsd { min_eigenvalue: f64, slack: f64 },

    #[error("element {index} is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsdAt { index: usize, min_eigenvalue: f64 },

    #[error("operator is not self-adjoint")]
    NotSelfAdjoint,

    #[error("operator kinds do not match: {0}")]
    KindMismatch(&'static str),

    #[error("section window {window} is smaller than required {required}")]
    WindowTooSmall { window: usize, required: usize },

    #[error("sandwich premise violated at n = {index}")]
    PremiseViolated { index: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
