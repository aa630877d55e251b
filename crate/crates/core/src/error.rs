use thiserror::Error;

/// Errors raised by model construction and the synthesis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// The input model is malformed (unknown names, nondeterminism, bad relation, ...).
    #[error("model error: {0}")]
    Model(String),
    /// A string does not label a path of the plant.
    #[error("string is not in the closed behavior of the plant: {0}")]
    Trajectory(String),
    /// An operation was called outside its precondition.
    #[error("contract violation: {0}")]
    Contract(String),
    /// A configured size cap was exceeded.
    #[error("limit exceeded: {0}")]
    Limit(String),
    /// A value could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
