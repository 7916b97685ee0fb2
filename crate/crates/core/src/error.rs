use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid tariff plan: {0}")]
    Tariff(String),

    #[error("encoding error: {0}")]
    Encoding(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("training diverged at epoch {epoch}: {reason}")]
    Training { epoch: usize, reason: String },

    #[error("metrics error: {0}")]
    Metrics(String),

    #[error("simulation error at hour {step}: leaf area is no longer finite")]
    Simulation { step: usize },

    #[error("fitness error: {0}")]
    Fitness(String),

    #[error("homography estimation failed: {0}")]
    Estimation(String),

    #[error("segmentation error: {0}")]
    Segmentation(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("experiment run {0} is missing")]
    MissingRun(u8),

    #[error("comparison error: {0}")]
    Comparison(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
