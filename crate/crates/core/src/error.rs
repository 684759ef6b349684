use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid model specification: {0}")]
    InvalidSpec(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("circulant embedding failed: minimum eigenvalue {min_eigenvalue:e} (max {max_eigenvalue:e})")]
    Embedding { min_eigenvalue: f64, max_eigenvalue: f64 },

    #[error("Toeplitz solver breakdown at order {order}: prediction variance {variance:e}")]
    ToeplitzBreakdown { order: usize, variance: f64 },

    #[error("fit failed: {0}")]
    FitFailed(String),

    #[error("asymptotic information matrix is not positive definite (identifiability failure)")]
    NotPositiveDefinite,

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
