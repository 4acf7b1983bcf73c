use thiserror::Error;

/// Errors raised by matrix decompositions, state constructors, and masker
/// evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension must be at least {min}, got {got}")]
    InvalidDimension { min: usize, got: usize },

    #[error("matrix entries must be finite")]
    NonFiniteEntries,

    #[error("entry count {len} does not match {rows}x{cols}")]
    ShapeMismatch { rows: usize, cols: usize, len: usize },

    #[error("matrix is not Hermitian: asymmetry {defect:e} exceeds tolerance {tol:e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("matrix is not unitary: defect {defect:e}")]
    NotUnitary { defect: f64 },

    #[error("eigenvalue {value:e} below PSD clamp tolerance -{tol:e}")]
    NotPositiveSemidefinite { value: f64, tol: f64 },

    #[error("input is not a density matrix: {reason}")]
    NotDensityMatrix { reason: String },

    #[error("iterative decomposition failed to converge after {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },

    #[error("vector is not normalized: norm {norm}")]
    NotNormalized { norm: f64 },

    #[error("superposition is numerically degenerate (norm {norm:e})")]
    DegenerateSuperposition { norm: f64 },

    #[error("linear map is not injective: smallest singular value {sigma_min:e}")]
    NotInjective { sigma_min: f64 },

    #[error("linear map is not trace-decreasing: largest singular value {sigma_max}")]
    NotTraceDecreasing { sigma_max: f64 },

    #[error("ancilla dimension {ancilla_dim} below numerical rank {rank}")]
    AncillaTooSmall { ancilla_dim: usize, rank: usize },

    #[error("image subspace rank {rank} too small, need at least 2")]
    RankDeficient { rank: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
