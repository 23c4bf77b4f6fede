use thiserror::Error;

/// Errors produced by the library surface.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("capacity exceeded: {what} is {size}, limit is {limit}")]
    Capacity {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    #[error("outside validity range: {0}")]
    BelowValidity(String),

    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),

    #[error("unsupported record schema version {found:?} (expected {expected:?})")]
    SchemaVersion { found: String, expected: String },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}
