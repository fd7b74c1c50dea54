use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (||A - A^dagger||_F = {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("block index ({k}, {l}) out of range for {dim_a} blocks")]
    IndexOutOfRange { k: usize, l: usize, dim_a: usize },
    #[error("unsupported subsystem dimension {dim_a} (expected 2 or 3)")]
    UnsupportedDimension { dim_a: usize },
    #[error("matrix is not unitary (||U^dagger U - I||_F = {defect:e})")]
    NotUnitary { defect: f64 },
    #[error("Schur complement is not PSD (min eigenvalue {min_eigenvalue:e})")]
    InconsistentBlocks { min_eigenvalue: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(&'static str),
    #[error("not a density matrix: {0}")]
    NotDensityMatrix(&'static str),
    #[error("invalid tolerance: {0} must be strictly positive")]
    InvalidTolerance(&'static str),
}
