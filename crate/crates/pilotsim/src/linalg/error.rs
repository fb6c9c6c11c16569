use thiserror::Error;

/// Failures raised by the matrix kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("{op}: dimension mismatch {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("{op}: expected a square matrix, got {rows}x{cols}")]
    NotSquare { op: &'static str, rows: usize, cols: usize },
    #[error("cannot reshape {len} entries into {rows}x{cols}")]
    Reshape { len: usize, rows: usize, cols: usize },
    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    EmptyMatrix { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (relative deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive definite: pivot {pivot:e} at index {index}")]
    NotPositiveDefinite { pivot: f64, index: usize },
    #[error("matrix is singular: pivot {pivot:e} at index {index}")]
    Singular { pivot: f64, index: usize },
    #[error("{op}: zero matrix")]
    ZeroMatrix { op: &'static str },
    #[error("{op}: result contains a non-finite entry")]
    NonFinite { op: &'static str },
    #[error("Jacobi sweep did not converge after {sweeps} sweeps (off-diagonal {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },
}
