use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Validation(Vec<String>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error(transparent)]
    Core(#[from] chlab::Error),

    #[error("failed to start worker pool: {0}")]
    Pool(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        CliError::Validation(vec![message.into()])
    }
}

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Success = 0,
    Validation = 1,
    BlowUp = 2,
    VerificationFailed = 3,
}

impl Outcome {
    pub fn code(self) -> i32 {
        self as i32
    }

    /// Exit status for an error that aborted a run.
    pub fn of_error(err: &CliError) -> Self {
        match err {
            CliError::Validation(_) => Outcome::Validation,
            CliError::Core(chlab::Error::BlowUp { .. } | chlab::Error::Collision { .. }) => Outcome::BlowUp,
            CliError::Core(
                chlab::Error::InvalidArgument(_)
                | chlab::Error::InvalidGrid(_)
                | chlab::Error::Constraint(_)
                | chlab::Error::LengthMismatch { .. }
                | chlab::Error::GridMismatch(_),
            ) => Outcome::Validation,
            CliError::Core(chlab::Error::NotMonotone { .. } | chlab::Error::Inconsistent { .. }) => {
                Outcome::VerificationFailed
            }
            CliError::Core(chlab::Error::NonFinite { .. }) => Outcome::BlowUp,
            // unusable output locations are treated as configuration errors
            CliError::Io { .. } | CliError::Json { .. } | CliError::Pool(_) => Outcome::Validation,
        }
    }
}
