use thiserror::Error;

/// Errors shared across the crate.
///
/// Numerical non-convergence is deliberately *not* an error: solvers return
/// their best iterate together with a `converged` flag so callers can decide
/// what to do with a marginal result.
#[derive(Error, Debug)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric: max |a_ij - a_ji| = {max_dev:.3e} exceeds tolerance")]
    NotSymmetric { max_dev: f64 },

    #[error("rank deficiency detected at column {column} during orthonormalization")]
    RankDeficient { column: usize },

    #[error("matrix is numerically singular: smallest eigenvalue {lambda_min:.3e} <= 1e-12")]
    Singular { lambda_min: f64 },

    #[error("matrix has a negative eigenvalue {lambda_min:.3e}; not positive semi-definite")]
    NotPositiveSemiDefinite { lambda_min: f64 },

    #[error("graph has isolated vertices {indices:?}; the normalized Laplacian is undefined")]
    IsolatedVertices { indices: Vec<usize> },

    #[error("power mean of nonpositive entry {value} at index {index} is undefined for p <= 0")]
    NonPositiveEntry { index: usize, value: f64 },

    #[error("feature row {row} has zero variance; Pearson correlation is undefined")]
    ZeroVariance { row: usize },

    #[error("{0}")]
    InvalidParameter(String),

    #[error(
        "clustering error with {k} labels exceeds the exact-matching limit of 8; \
         use a Hungarian-algorithm implementation for larger label sets"
    )]
    TooManyLabels { k: usize },

    #[error("layer {layer} still has an isolated vertex after {attempts} sampling attempts")]
    SamplerExhausted { layer: usize, attempts: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
