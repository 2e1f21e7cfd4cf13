use std::path::Path;

use wikiref_core::Error as CoreError;

/// Process exit status of the command-line tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    Input = 2,
    Config = 3,
    Internal = 4,
}

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    /// Unreadable or malformed input, unknown targets.
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Internal(String),
}

pub type AppResult<T> = Result<T, AppError>;

impl AppError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            AppError::Input(_) => ExitCode::Input,
            AppError::Config(_) => ExitCode::Config,
            AppError::Internal(_) => ExitCode::Internal,
        }
    }

    /// Wraps a core error raised during `stage`.
    pub fn stage(stage: &str, err: CoreError) -> Self {
        let message = format!("{stage}: {err}");
        match err {
            CoreError::Configuration(_) => AppError::Config(message),
            CoreError::Resampling(_) | CoreError::Training(_) => AppError::Internal(message),
            CoreError::Schema { .. }
            | CoreError::DuplicateTitle(_)
            | CoreError::Ownership(_)
            | CoreError::Consistency(_)
            | CoreError::Shape { .. } => AppError::Input(message),
        }
    }

    pub fn read(path: &Path, err: std::io::Error) -> Self {
        AppError::Input(format!("cannot read {}: {err}", path.display()))
    }

    pub fn write(path: &Path, err: impl std::fmt::Display) -> Self {
        AppError::Internal(format!("cannot write {}: {err}", path.display()))
    }
}
