use thiserror::Error;

/// Errors produced by the library's numerical and contract checks.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("archive is empty")]
    EmptyArchive,

    #[error("generation size mismatch: expected {expected}, got {actual}")]
    GenerationSizeMismatch { expected: usize, actual: usize },

    #[error("sample {index} has no fitness value")]
    MissingFitness { index: usize },

    #[error("rejection sampling acceptance rate below {threshold:e} after {trials} trials")]
    DegenerateRegion { threshold: f64, trials: u64 },

    #[error("empty sample passed to statistical test")]
    EmptySample,
}

pub type Result<T> = std::result::Result<T, CoreError>;
