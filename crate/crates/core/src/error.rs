use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("signal must contain at least one sample")]
    EmptySignal,
    #[error("sample {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
    #[error("degenerate signal: {0}")]
    DegenerateSignal(&'static str),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("search space is empty or malformed: {0}")]
    EmptySpace(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid_params(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}
