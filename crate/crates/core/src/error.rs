use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("budget error: {0}")]
    Budget(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid comparison pair ({0}, {1})")]
    InvalidPair(usize, usize),

    #[error("degenerate direction: {0}")]
    DegenerateDirection(String),

    #[error("degenerate projection: sum of squared projections is zero")]
    DegenerateProjection,

    #[error("active learner exhausted the pool: {0}")]
    Exhausted(String),

    #[error("degenerate statistics: {0}")]
    Degenerate(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
