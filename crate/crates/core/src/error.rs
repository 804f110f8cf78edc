use crate::poly::Mode;

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("mode mismatch: {left} vs {right}")]
    ModeMismatch { left: Mode, right: Mode },
    #[error("expected a {expected}-mode polynomial, found {found}")]
    WrongMode { expected: Mode, found: Mode },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("n_value must be a positive integer")]
    ZeroN,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("sampler: {0}")]
    Sampler(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("sample pool of {needed} points exceeds the cap of {cap}; lower the degree cap")]
    PoolTooSmall { needed: usize, cap: usize },
    #[error("model space mismatch")]
    SpaceMismatch,
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("invalid catalog: {0}")]
    Catalog(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, TraceError>;
