use std::path::PathBuf;

use schedgeo_core::Error as CoreError;

/// Failures of a command, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, bad config file contents, or out-of-domain parameters.
    #[error("{0}")]
    Invalid(String),

    /// The validation suite ran but at least one check failed.
    #[error("{failed} of {total} validation checks failed")]
    ChecksFailed { failed: usize, total: usize },

    #[error("{0}")]
    Numerical(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) | CliError::ChecksFailed { .. } => 1,
            CliError::Numerical(_) => 2,
            CliError::Io { .. } | CliError::Csv(_) => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Numerical { .. } => CliError::Numerical(e.to_string()),
            CoreError::Domain(_) | CoreError::Config(_) => CliError::Invalid(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
