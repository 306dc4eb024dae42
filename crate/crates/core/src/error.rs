use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid structure: {0}")]
    Invalid(String),
    #[error("obstruction at {location}: {detail}")]
    Obstruction { location: String, detail: String },
    #[error("parse error at {path}: {msg}")]
    Parse { path: String, msg: String },
    #[error("missing data: {0}")]
    Missing(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
