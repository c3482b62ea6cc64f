use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot parse {}: {detail}", path.display())]
    Parse { path: PathBuf, detail: String },

    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Validation(String),

    #[error(transparent)]
    Compute(#[from] scanvar::Error),

    #[error("{}", .0.join("\n"))]
    Assertion(Vec<String>),
}

impl CliError {
    /// 0 success, 1 validation, 2 failed assertion, 3 I/O or parse.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) | CliError::Compute(_) => 1,
            CliError::Assertion(_) => 2,
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Usage(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
