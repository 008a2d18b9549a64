//! Shared building blocks: domain types, the snapshot/action CSV codecs,
//! task-set loading and the subprocess runner.

pub mod csv;
pub mod error;
pub mod model;
pub mod runner;
pub mod session;
pub mod tasks;

pub use crate::csv::{
    decode_actions, decode_snapshots, encode_actions, encode_snapshots, ACTION_HEADER,
    SNAPSHOT_HEADER,
};
pub use crate::error::{MalformedCsv, ModelError};
pub use crate::model::{
    iso_date, now_millis, ActionRecord, EventType, Experience, Score, SnapshotRecord,
    SolutionSession, SubmissionReceipt, SurveyInfo, TaskSpec, TestCase,
};

/// Canonical form used when comparing program output with expected output:
/// trailing whitespace is trimmed on every line, line endings become LF and
/// trailing newlines are dropped.
pub fn normalize_output(text: &str) -> String {
    let lines: Vec<&str> = text.split('\n').map(str::trim_end).collect();
    lines.join("\n").trim_end_matches('\n').to_string()
}

/// Number of lines in a text: one plus the number of LF characters.
pub fn line_count(text: &str) -> usize {
    1 + text.bytes().filter(|&b| b == b'\n').count()
}
