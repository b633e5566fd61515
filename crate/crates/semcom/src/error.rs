//! Crate-wide error type and exit-code mapping.

use std::path::PathBuf;

/// Errors surfaced by the simulator and its CLI.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unknown token: {0:?}")]
    UnknownToken(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("label index {0} out of range")]
    LabelOutOfRange(usize),

    #[error("codec is not trained or initialized")]
    UntrainedCodec,

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("referenced file not found: {0}")]
    MissingFile(PathBuf),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 for configuration/input problems,
    /// 3 for runtime numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::DimensionMismatch(_)
            | Error::UnknownToken(_)
            | Error::EmptyInput(_)
            | Error::LabelOutOfRange(_)
            | Error::MissingFile(_)
            | Error::Io(_)
            | Error::Json(_) => 2,
            Error::UntrainedCodec | Error::Numeric(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
