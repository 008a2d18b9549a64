//! Scoring a code state as the fraction of passing stdin/stdout tests.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use codetrail_core::runner::{expand_template, run_command, template_vars, RunError, RunnerConfig};
use codetrail_core::{normalize_output, Score, SolutionSession, TaskSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filter::{kept_indices, FinalityCriterion};

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("no runner configured for language {0:?}")]
    RunnerMissing(String),
    #[error("task {0:?} has no tests")]
    NoTests(String),
    #[error("invalid runner: {0}")]
    InvalidRunner(RunError),
    /// The harness itself failed (interpreter missing, temp dir unavailable);
    /// distinct from the program failing a test.
    #[error("sandbox failure: {0}")]
    Sandbox(RunError),
}

impl From<std::io::Error> for ScoreError {
    fn from(e: std::io::Error) -> Self {
        ScoreError::Sandbox(RunError::Io(e))
    }
}

/// `runners.json`: language family to runner configuration.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Runners(pub BTreeMap<String, RunnerConfig>);

impl Runners {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path)?;
        let runners: Runners = serde_json::from_str(&text)?;
        for (lang, r) in &runners.0 {
            r.validate()
                .map_err(|e| anyhow::anyhow!("runner for {lang:?}: {e}"))?;
        }
        Ok(runners)
    }

    pub fn get(&self, language: &str) -> Result<&RunnerConfig, ScoreError> {
        self.0
            .get(language)
            .ok_or_else(|| ScoreError::RunnerMissing(language.to_string()))
    }
}

/// True when the program output matches the expectation after trimming
/// trailing whitespace per line and trailing newlines.
pub fn outputs_match(actual: &str, expected: &str) -> bool {
    normalize_output(actual) == normalize_output(expected)
}

/// Compiles (when configured) and runs `code` once per test, each run in a
/// fresh working directory. Crashes, timeouts and compile failures fail the
/// affected tests; only harness failures are errors.
pub fn score_solution(
    task: &TaskSpec,
    code: &str,
    runner: &RunnerConfig,
) -> Result<Score, ScoreError> {
    if task.tests.is_empty() {
        return Err(ScoreError::NoTests(task.key.clone()));
    }
    runner.validate().map_err(ScoreError::InvalidRunner)?;
    let total = task.tests.len() as u32;
    let zero = || Score::new(0, total).expect("total is positive");

    let build = tempfile::tempdir()?;
    let source = build.path().join(&runner.source_file);
    fs::write(&source, code)?;
    let vars = template_vars(&source, build.path());

    if let Some(compile) = &runner.compile_template {
        let argv = expand_template(compile, &vars).map_err(ScoreError::InvalidRunner)?;
        let result =
            run_command(&argv, "", build.path(), runner.timeout()).map_err(ScoreError::Sandbox)?;
        if !result.success() {
            return Ok(zero());
        }
    }

    let argv = expand_template(&runner.command_template, &vars).map_err(ScoreError::InvalidRunner)?;
    let mut passed = 0;
    for test in &task.tests {
        let workdir = tempfile::tempdir()?;
        let result = run_command(&argv, &test.input, workdir.path(), runner.timeout())
            .map_err(ScoreError::Sandbox)?;
        if result.success() && outputs_match(&result.stdout, &test.expected_output) {
            passed += 1;
        }
    }
    Ok(Score::new(passed, total).expect("passed never exceeds total"))
}

/// One scored code state of a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TimelineEntry {
    pub snapshot_index: usize,
    pub timestamp_millis: i64,
    /// `None` when the state could not be scored; see `error`.
    pub score: Option<Score>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Scores every snapshot kept by `criterion`, in chronological order.
pub fn score_timeline(
    session: &SolutionSession,
    task: &TaskSpec,
    criterion: FinalityCriterion,
    runner: &RunnerConfig,
) -> Vec<TimelineEntry> {
    kept_indices(&session.snapshots, criterion)
        .into_par_iter()
        .map(|i| {
            let snapshot = &session.snapshots[i];
            let (score, error) = match score_solution(task, &snapshot.fragment, runner) {
                Ok(s) => (Some(s), None),
                Err(e) => (None, Some(e.to_string())),
            };
            TimelineEntry {
                snapshot_index: i,
                timestamp_millis: snapshot.timestamp_millis,
                score,
                error,
            }
        })
        .collect()
}
