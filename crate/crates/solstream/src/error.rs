use std::io;

use thiserror::Error;

/// Crate-wide error type. Variants map onto the CLI exit codes:
/// `Config` -> 2, `Parse`/`Data`/`Io` -> 3, `Numeric` -> 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("data error: {0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    /// Process exit code for the benchmark binary.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Parse { .. } | Error::Data(_) | Error::Io(_) => 3,
            Error::Numeric(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
