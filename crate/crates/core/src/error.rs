use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("non-finite value in {context} at index {index}")]
    NonFinite { context: &'static str, index: usize },

    #[error("operator is not symmetric: entry ({row}, {col}) differs from its transpose")]
    NotSymmetric { row: usize, col: usize },

    #[error("singular system: pivot {pivot} has magnitude {magnitude:e}")]
    Singular { pivot: usize, magnitude: f64 },

    #[error("rank deficient constraint operator: sigma_min/sigma_max = {ratio:e} below {tol:e}")]
    RankDeficient { ratio: f64, tol: f64 },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("{solver} did not converge: residual {residual:e} after {iterations} iterations")]
    NotConverged {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("{solver} broke down: {reason}")]
    Breakdown {
        solver: &'static str,
        reason: String,
    },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("point is not a constrained minimizer: gradient residual outside range(C^T) is {residual:e} (tolerance {tol:e})")]
    NotOptimal { residual: f64, tol: f64 },

    #[error("point is infeasible: |Cx - d| = {residual:e} exceeds tolerance {tol:e}")]
    Infeasible { residual: f64, tol: f64 },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
