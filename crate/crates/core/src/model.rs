//! Domain types shared by the tracker, the collection server and the
//! offline tooling.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::DateTime;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Renders epoch milliseconds as an ISO-8601 UTC string with millisecond
/// precision, e.g. `2021-03-01T12:00:00.250Z`.
///
/// Timestamps outside the representable calendar range render as an empty
/// string; such records never survive a decode.
pub fn iso_date(timestamp_millis: i64) -> String {
    match DateTime::from_timestamp_millis(timestamp_millis) {
        Some(dt) => dt.format("%Y-%m-%dT%H:%M:%S%.3fZ").to_string(),
        None => String::new(),
    }
}

/// Current wall-clock time in epoch milliseconds.
pub fn now_millis() -> i64 {
    chrono::Utc::now().timestamp_millis()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experience {
    None,
    LessThanHalfYear,
    HalfToOneYear,
    OneToTwoYears,
    TwoToFourYears,
    FourToSixYears,
    MoreThanSixYears,
}

impl Experience {
    pub const ALL: [Experience; 7] = [
        Experience::None,
        Experience::LessThanHalfYear,
        Experience::HalfToOneYear,
        Experience::OneToTwoYears,
        Experience::TwoToFourYears,
        Experience::FourToSixYears,
        Experience::MoreThanSixYears,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Experience::None => "none",
            Experience::LessThanHalfYear => "less_than_half_year",
            Experience::HalfToOneYear => "half_to_one_year",
            Experience::OneToTwoYears => "one_to_two_years",
            Experience::TwoToFourYears => "two_to_four_years",
            Experience::FourToSixYears => "four_to_six_years",
            Experience::MoreThanSixYears => "more_than_six_years",
        }
    }
}

impl fmt::Display for Experience {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub const MAX_AGE: i32 = 150;

/// Demographic survey filled once per installation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyInfo {
    pub gender: String,
    pub age: i32,
    /// ISO-3166 alpha-2 code.
    pub country: String,
    pub experience: Experience,
}

impl SurveyInfo {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(0..=MAX_AGE).contains(&self.age) {
            return Err(ModelError::InvalidSurvey(format!(
                "age {} outside [0, {MAX_AGE}]",
                self.age
            )));
        }
        if self.gender.trim().is_empty() {
            return Err(ModelError::InvalidSurvey("gender is empty".into()));
        }
        let c = self.country.as_bytes();
        if c.len() != 2 || !c.iter().all(u8::is_ascii_uppercase) {
            return Err(ModelError::InvalidSurvey(format!(
                "country {:?} is not an ISO-3166 alpha-2 code",
                self.country
            )));
        }
        Ok(())
    }
}

/// One stdin/stdout test of a task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TestCase {
    pub input: String,
    pub expected_output: String,
    /// Set when the test deliberately expects no output at all.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub allow_empty_output: bool,
}

impl TestCase {
    pub fn new(input: impl Into<String>, expected_output: impl Into<String>) -> Self {
        TestCase {
            input: input.into(),
            expected_output: expected_output.into(),
            allow_empty_output: false,
        }
    }
}

/// A task description as served to trackers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TaskSpec {
    pub key: String,
    pub names: BTreeMap<String, String>,
    pub descriptions: BTreeMap<String, String>,
    /// Tests shown to the student; each one is also a member of `tests`.
    pub examples: Vec<TestCase>,
    pub tests: Vec<TestCase>,
    pub supported_languages: Vec<String>,
}

impl TaskSpec {
    pub fn supports(&self, language: &str) -> bool {
        self.supported_languages.iter().any(|l| l == language)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |msg: String| Err(ModelError::InvalidTask {
            key: self.key.clone(),
            message: msg,
        });
        if self.key.is_empty() {
            return bad("key is empty".into());
        }
        if !self
            .key
            .bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_')
        {
            return bad("key must be lowercase snake case".into());
        }
        if self.tests.is_empty() {
            return bad("task has no tests".into());
        }
        for (i, t) in self.tests.iter().enumerate() {
            if !t.allow_empty_output && crate::normalize_output(&t.expected_output).is_empty() {
                return bad(format!("test {i} expects empty output without allowEmptyOutput"));
            }
        }
        for (i, ex) in self.examples.iter().enumerate() {
            if !self
                .tests
                .iter()
                .any(|t| t.input == ex.input && t.expected_output == ex.expected_output)
            {
                return bad(format!("example {i} is not one of the tests"));
            }
        }
        Ok(())
    }
}

/// Full-text capture of the draft file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SnapshotRecord {
    pub timestamp_millis: i64,
    pub task_key: String,
    pub language: String,
    pub file_name: String,
    pub fragment: String,
}

impl SnapshotRecord {
    pub fn date_iso(&self) -> String {
        iso_date(self.timestamp_millis)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventType {
    Action,
    Run,
    Lifecycle,
}

impl EventType {
    pub fn as_str(self) -> &'static str {
        match self {
            EventType::Action => "Action",
            EventType::Run => "Run",
            EventType::Lifecycle => "Lifecycle",
        }
    }
}

impl fmt::Display for EventType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EventType {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Action" => Ok(EventType::Action),
            "Run" => Ok(EventType::Run),
            "Lifecycle" => Ok(EventType::Lifecycle),
            other => Err(ModelError::UnknownEventType(other.to_string())),
        }
    }
}

/// A non-textual editor or tool event.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ActionRecord {
    pub timestamp_millis: i64,
    pub event_type: EventType,
    pub action_id: String,
    pub detail: String,
}

impl ActionRecord {
    pub fn date_iso(&self) -> String {
        iso_date(self.timestamp_millis)
    }
}

/// Everything a user produced for one task attempt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolutionSession {
    pub user_id: String,
    pub task_key: String,
    pub language: String,
    pub survey: SurveyInfo,
    pub snapshots: Vec<SnapshotRecord>,
    pub actions: Vec<ActionRecord>,
    pub submitted_at_millis: i64,
}

impl SolutionSession {
    /// Checks the submission-time invariants of a session.
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.snapshots.is_empty() {
            return Err(ModelError::InvalidSession("no snapshots".into()));
        }
        for (i, pair) in self.snapshots.windows(2).enumerate() {
            if pair[1].timestamp_millis < pair[0].timestamp_millis {
                return Err(ModelError::InvalidSession(format!(
                    "snapshot {} goes back in time",
                    i + 1
                )));
            }
            if pair[1].fragment == pair[0].fragment {
                return Err(ModelError::InvalidSession(format!(
                    "snapshot {} repeats its predecessor",
                    i + 1
                )));
            }
        }
        if let Some(i) = self
            .actions
            .windows(2)
            .position(|w| w[1].timestamp_millis < w[0].timestamp_millis)
        {
            return Err(ModelError::InvalidSession(format!(
                "action {} goes back in time",
                i + 1
            )));
        }
        if let Some(s) = self.snapshots.iter().find(|s| s.task_key != self.task_key) {
            return Err(ModelError::InvalidSession(format!(
                "snapshot for task {:?} in session for {:?}",
                s.task_key, self.task_key
            )));
        }
        Ok(())
    }
}

/// Fraction of passing tests, kept as an exact integer pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Score {
    passed: u32,
    total: u32,
}

impl Score {
    pub fn new(passed: u32, total: u32) -> Result<Self, ModelError> {
        if total == 0 || passed > total {
            return Err(ModelError::InvalidScore { passed, total });
        }
        Ok(Score { passed, total })
    }

    pub fn passed(&self) -> u32 {
        self.passed
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    pub fn value(&self) -> f64 {
        f64::from(self.passed) / f64::from(self.total)
    }

    pub fn is_perfect(&self) -> bool {
        self.passed == self.total
    }

    /// Exact rational comparison, `a/b == c/d` iff `a*d == c*b`.
    pub fn same_value(&self, other: &Score) -> bool {
        u64::from(self.passed) * u64::from(other.total)
            == u64::from(other.passed) * u64::from(self.total)
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.passed, self.total)
    }
}

#[derive(Serialize, Deserialize)]
struct ScoreRepr {
    passed: u32,
    total: u32,
    #[serde(default)]
    value: Option<f64>,
}

impl Serialize for Score {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ScoreRepr {
            passed: self.passed,
            total: self.total,
            value: Some(self.value()),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Score {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = ScoreRepr::deserialize(deserializer)?;
        Score::new(repr.passed, repr.total).map_err(serde::de::Error::custom)
    }
}

/// Server acknowledgement of one stored submission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SubmissionReceipt {
    pub submission_index: u64,
}
