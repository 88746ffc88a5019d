use thiserror::Error;

/// Errors raised across the regression pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("variable index {index} out of range for {n_vars} variables")]
    IndexOutOfRange { index: usize, n_vars: usize },

    #[error("polynomial has zero variance")]
    DegenerateVariance,

    #[error("frame is not orthonormal: |Q^T Q - I|_F = {defect:e}")]
    InvalidFrame { defect: f64 },

    #[error("requested {k} columns in dimension {d}")]
    InvalidShape { d: usize, k: usize },

    #[error("retraction failed: Q + delta*M is rank deficient")]
    RankDeficientRetraction,

    #[error("least-squares system is rank deficient at column {column}; use more data or a smaller degree")]
    RankDeficient { column: usize },

    #[error("non-finite value in input data")]
    NonFinite,

    #[error("empty dataset")]
    EmptyDataset,

    #[error("point component {value} lies outside the unit interval")]
    OutsideUnitCube { value: f64 },

    #[error("invalid basis key (level {level}, index {index})")]
    InvalidBasisKey { level: u32, index: u32 },

    #[error("conjugate gradient stopped after {iterations} iterations at reduction {achieved:e}")]
    CgNotConverged { iterations: usize, achieved: f64 },

    #[error("grid has no fitted coefficients")]
    Unfitted,

    #[error("no refinable basis function left")]
    Saturated,

    #[error("all test targets are zero")]
    ZeroTargets,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
