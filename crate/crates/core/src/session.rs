//! Submission folders in the export layout:
//! `<userId>/<taskKey>/<submissionIndex>/{snapshots.csv, actions.csv, meta.json}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::csv::{decode_actions, decode_snapshots};
use crate::error::MalformedCsv;
use crate::model::{SolutionSession, SurveyInfo};

pub const SNAPSHOTS_FILE: &str = "snapshots.csv";
pub const ACTIONS_FILE: &str = "actions.csv";
pub const META_FILE: &str = "meta.json";

/// Metadata stored next to the two CSV files of a submission.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SubmissionMeta {
    pub user_id: String,
    pub task_key: String,
    pub language: String,
    pub submission_index: u64,
    pub received_at_millis: i64,
    pub survey: SurveyInfo,
}

#[derive(Debug, Error)]
pub enum SessionLoadError {
    #[error("cannot read {file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: {source}")]
    Csv {
        file: String,
        #[source]
        source: MalformedCsv,
    },
    #[error("{file}: {source}")]
    Meta {
        file: String,
        #[source]
        source: serde_json::Error,
    },
}

fn read(dir: &Path, name: &str) -> Result<String, SessionLoadError> {
    let path = dir.join(name);
    fs::read_to_string(&path).map_err(|source| SessionLoadError::Io {
        file: path.display().to_string(),
        source,
    })
}

pub fn load_meta(dir: &Path) -> Result<SubmissionMeta, SessionLoadError> {
    let text = read(dir, META_FILE)?;
    serde_json::from_str(&text).map_err(|source| SessionLoadError::Meta {
        file: dir.join(META_FILE).display().to_string(),
        source,
    })
}

/// Loads one submission folder as a session.
pub fn load_session_dir(dir: &Path) -> Result<SolutionSession, SessionLoadError> {
    let meta = load_meta(dir)?;
    let csv_err = |name: &str| {
        let file = dir.join(name).display().to_string();
        move |source| SessionLoadError::Csv { file, source }
    };
    let snapshots = decode_snapshots(&read(dir, SNAPSHOTS_FILE)?).map_err(csv_err(SNAPSHOTS_FILE))?;
    let actions = decode_actions(&read(dir, ACTIONS_FILE)?).map_err(csv_err(ACTIONS_FILE))?;
    Ok(SolutionSession {
        user_id: meta.user_id,
        task_key: meta.task_key,
        language: meta.language,
        survey: meta.survey,
        snapshots,
        actions,
        submitted_at_millis: meta.received_at_millis,
    })
}
