use thiserror::Error;

/// Errors shared across all modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("not prime: {0}")]
    NotPrime(u64),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("bad index: {0}")]
    BadIndex(String),
    #[error("bad mode: {0}")]
    BadMode(String),
    #[error("bad lambda: {0}")]
    BadLambda(String),
    #[error("bad tag: expected {expected}, got {got}")]
    BadTag { expected: String, got: String },
    #[error("bad parameter: {0}")]
    BadParam(String),
    #[error("bad range: {0}")]
    BadRange(String),
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("unknown bound: {0}")]
    UnknownBound(String),
    #[error("bad inputs: {0}")]
    BadInputs(String),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
