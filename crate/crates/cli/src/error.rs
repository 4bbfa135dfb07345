//! CLI error type. Every failure maps to a short machine-parseable code;
//! `main` prints `error[<code>]: <message>` as a single line and exits
//! nonzero.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    ConfigParse { path: PathBuf, message: String },

    #[error("{0}")]
    Config(String),

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("{path}: checksum mismatch (stored {stored:016x}, computed {computed:016x})")]
    Checksum {
        path: PathBuf,
        stored: u64,
        computed: u64,
    },

    #[error(transparent)]
    Core(#[from] videomerge_core::Error),
}

impl CliError {
    /// Stable single-token code for scripted consumers.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::ConfigParse { .. } | CliError::Config(_) => "config",
            CliError::Format { .. } => "format",
            CliError::Checksum { .. } => "checksum",
            CliError::Core(err) => match err {
                videomerge_core::Error::InvalidShape(_) => "shape",
                videomerge_core::Error::InvalidParameter(_) => "params",
                videomerge_core::Error::Denoiser { .. } => "denoiser",
                videomerge_core::Error::NonRealResult { .. } => "numeric",
                _ => "core",
            },
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
