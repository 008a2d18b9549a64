//! Read-only access to a corpus in the export layout
//! `<userId>/<taskKey>/<submissionIndex>/{snapshots.csv,actions.csv,meta.json}`.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use codetrail_core::session::{load_meta, load_session_dir};
use codetrail_core::SolutionSession;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone)]
pub struct Submission {
    pub submission_index: u64,
    pub received_at_millis: i64,
    pub session: SolutionSession,
}

/// A submission folder that could not be loaded. It is skipped, not fatal.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("corrupt submission {folder}: {reason}")]
pub struct CorruptSubmission {
    pub folder: PathBuf,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct Dataset {
    /// Sorted by user, task and numeric index.
    pub submissions: Vec<Submission>,
    pub corrupt: Vec<CorruptSubmission>,
}

fn subdirs(dir: &Path) -> io::Result<Vec<(String, PathBuf)>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if entry.file_type()?.is_dir() && !name.starts_with('.') {
            out.push((name, entry.path()));
        }
    }
    out.sort();
    Ok(out)
}

fn load_one(user: &str, task: &str, index: &str, dir: &Path) -> Result<Submission, String> {
    let submission_index: u64 = index
        .parse()
        .map_err(|_| format!("folder name {index:?} is not a submission index"))?;
    let meta = load_meta(dir).map_err(|e| e.to_string())?;
    let session = load_session_dir(dir).map_err(|e| e.to_string())?;
    if meta.user_id != user || meta.task_key != task || meta.submission_index != submission_index {
        return Err(format!(
            "meta.json names {}/{}/{}",
            meta.user_id, meta.task_key, meta.submission_index
        ));
    }
    Ok(Submission {
        submission_index,
        received_at_millis: meta.received_at_millis,
        session,
    })
}

impl Dataset {
    pub fn open(root: &Path) -> io::Result<Self> {
        let mut folders = Vec::new();
        for (user, user_dir) in subdirs(root)? {
            for (task, task_dir) in subdirs(&user_dir)? {
                for (index, dir) in subdirs(&task_dir)? {
                    folders.push((user.clone(), task.clone(), index, dir));
                }
            }
        }
        let loaded: Vec<_> = folders
            .par_iter()
            .map(|(user, task, index, dir)| {
                load_one(user, task, index, dir).map_err(|reason| CorruptSubmission {
                    folder: dir.clone(),
                    reason,
                })
            })
            .collect();

        let mut dataset = Dataset::default();
        for item in loaded {
            match item {
                Ok(s) => dataset.submissions.push(s),
                Err(c) => dataset.corrupt.push(c),
            }
        }
        dataset.submissions.sort_by(|a, b| {
            (&a.session.user_id, &a.session.task_key, a.submission_index)
                .cmp(&(&b.session.user_id, &b.session.task_key, b.submission_index))
        });
        Ok(dataset)
    }
}
