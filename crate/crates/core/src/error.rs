use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("invalid survey: {0}")]
    InvalidSurvey(String),
    #[error("invalid task {key:?}: {message}")]
    InvalidTask { key: String, message: String },
    #[error("duplicate task key {0:?}")]
    DuplicateTask(String),
    #[error("invalid session: {0}")]
    InvalidSession(String),
    #[error("unknown event type {0:?}")]
    UnknownEventType(String),
    #[error("invalid score {passed}/{total}")]
    InvalidScore { passed: u32, total: u32 },
}

/// Decoding failure of one of the event-log CSV files.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("malformed CSV at line {line}: {message}")]
pub struct MalformedCsv {
    /// 1-based physical line number.
    pub line: usize,
    pub message: String,
}

impl MalformedCsv {
    pub(crate) fn new(line: usize, message: impl Into<String>) -> Self {
        MalformedCsv {
            line,
            message: message.into(),
        }
    }
}
