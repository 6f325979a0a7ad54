use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("invalid record {id}: {message}")]
    Invalid { id: String, message: String },
    #[error("duplicate {kind} id {id}")]
    Duplicate { kind: &'static str, id: String },
    #[error("unknown category {0}")]
    UnknownCategory(String),
    #[error("unknown entity {0}")]
    UnknownEntity(String),
    #[error("unknown speech {0}")]
    UnknownSpeech(String),
    #[error("query has no terms after tokenization")]
    EmptyQuery,
    #[error("k must be at least 1")]
    InvalidK,
    #[error("illegal transition: {0}")]
    IllegalTransition(String),
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),
    #[error("malformed log: {0}")]
    MalformedLog(String),
    #[error("unsupported index format: {0}")]
    IndexFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
