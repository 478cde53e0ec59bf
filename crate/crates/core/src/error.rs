use thiserror::Error;

/// Errors produced by the matching library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("oracle refuses n = {n} (limit {limit})")]
    OracleLimit { n: usize, limit: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("row {row} of the relaxed problem is infeasible: {reason}")]
    Infeasible { row: usize, reason: String },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("seed generation failed: {0}")]
    SeedGeneration(String),

    #[error("instance construction failed: {0}")]
    Construction(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by the caller's input rather than by numerics.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::NoConvergence { .. }
                | Error::Infeasible { .. }
                | Error::Singular(_)
                | Error::SeedGeneration(_)
                | Error::Construction(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
