use std::collections::HashSet;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::error::ModelError;
use crate::model::TaskSpec;

#[derive(Debug, Error)]
pub enum TaskSetError {
    #[error("cannot read task set {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("task set is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] ModelError),
}

/// Parses a `tasks.json` document and checks every task plus key uniqueness.
pub fn parse_task_set(text: &str) -> Result<Vec<TaskSpec>, TaskSetError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let tasks: Vec<TaskSpec> = serde_json::from_str(text)?;
    let mut seen = HashSet::new();
    for task in &tasks {
        task.validate()?;
        if !seen.insert(task.key.as_str()) {
            return Err(ModelError::DuplicateTask(task.key.clone()).into());
        }
    }
    Ok(tasks)
}

pub fn load_task_set(path: &Path) -> Result<Vec<TaskSpec>, TaskSetError> {
    let text = fs::read_to_string(path).map_err(|source| TaskSetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_task_set(&text)
}

pub fn find_task<'a>(tasks: &'a [TaskSpec], key: &str) -> Option<&'a TaskSpec> {
    tasks.iter().find(|t| t.key == key)
}
