use codetrail_core::runner::RunError;
use thiserror::Error;

use crate::daemon::Phase;

#[derive(Debug, Error)]
pub enum TrackerError {
    #[error("server unreachable: {0}")]
    ServerUnreachable(String),
    #[error("server rejected the request ({status}): {message}")]
    ServerRejected { status: u16, message: String },
    #[error("{0}")]
    InvalidSurvey(String),
    #[error("operation not allowed in phase {actual:?}")]
    InvalidPhase { actual: Phase },
    #[error("unknown task {0:?}")]
    UnknownTask(String),
    #[error("task {task:?} does not support language {language:?}")]
    UnsupportedLanguage { task: String, language: String },
    #[error("invalid event: {0}")]
    InvalidEvent(String),
    #[error("no runner configured for language {0:?}")]
    RunnerMissing(String),
    #[error("nothing to submit: no snapshots captured")]
    NothingToSubmit,
    #[error("run failed: {0}")]
    Run(#[from] RunError),
    #[error("local storage failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid local state: {0}")]
    Corrupt(String),
}

impl TrackerError {
    /// Stable identifier used in API error bodies.
    pub fn kind(&self) -> &'static str {
        match self {
            TrackerError::ServerUnreachable(_) => "ServerUnreachable",
            TrackerError::ServerRejected { .. } => "ServerRejected",
            TrackerError::InvalidSurvey(_) => "InvalidSurvey",
            TrackerError::InvalidPhase { .. } => "InvalidPhase",
            TrackerError::UnknownTask(_) => "UnknownTask",
            TrackerError::UnsupportedLanguage { .. } => "UnsupportedLanguage",
            TrackerError::InvalidEvent(_) => "InvalidEvent",
            TrackerError::RunnerMissing(_) => "RunnerMissing",
            TrackerError::NothingToSubmit => "NothingToSubmit",
            TrackerError::Run(_) => "RunFailed",
            TrackerError::Io(_) => "StorageFailure",
            TrackerError::Corrupt(_) => "CorruptState",
        }
    }
}
