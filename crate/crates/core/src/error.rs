use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("logic error: {0}")]
    Logic(String),
    /// A size cap was hit (DNF blow-up, too many atoms, search budget).
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid state: {0}")]
    State(String),
    #[error("invalid option: {0}")]
    InvalidOption(String),
    #[error("query generation failed: {0}")]
    NoQuery(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
