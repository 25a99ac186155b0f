use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("training error in parameter `{param}`: {reason}")]
    Training { param: String, reason: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("held-karp supports at most {max} cities, got {n}; use a heuristic solver")]
    Capacity { n: usize, max: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("invalid data: {0}")]
    Data(String),

    #[error("parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("invalid generation spec: {0}")]
    Spec(String),

    #[error("model was trained for n={expected} and cannot handle n={got}")]
    UnsupportedLength { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("decode failed: {0}")]
    Decode(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
