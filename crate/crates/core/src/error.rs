use thiserror::Error;

use crate::stream::ValidationError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("example does not match the learner schema: {0}")]
    SchemaMismatch(#[from] ValidationError),
    #[error("attribute observer expects a {expected} value")]
    ObserverKind { expected: &'static str },
    #[error("class distribution has no positive mass")]
    EmptyDistribution,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown {what} `{name}`")]
    Unknown { what: &'static str, name: String },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("model file version {found} is not supported (expected {expected})")]
    VersionMismatch { expected: u8, found: u8 },
    #[error("corrupt model payload: {0}")]
    Corrupt(String),
    #[error("mismatched datasets: {0}")]
    MismatchedDatasets(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
