#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use codetrail_core::session::SubmissionMeta;
use codetrail_core::{
    encode_actions, encode_snapshots, ActionRecord, EventType, Experience, SnapshotRecord, SurveyInfo,
};

pub const T0: i64 = 1_700_000_000_000;

pub fn config_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config")
}

pub fn reference(task: &str) -> String {
    fs::read_to_string(config_dir().join("reference").join(format!("{task}.py"))).unwrap()
}

pub fn survey(age: i32, country: &str) -> SurveyInfo {
    SurveyInfo {
        gender: "female".into(),
        age,
        country: country.into(),
        experience: Experience::OneToTwoYears,
    }
}

pub fn snapshot(offset_ms: i64, task: &str, fragment: &str) -> SnapshotRecord {
    SnapshotRecord {
        timestamp_millis: T0 + offset_ms,
        task_key: task.into(),
        language: "python".into(),
        file_name: format!("{task}.py"),
        fragment: fragment.into(),
    }
}

pub fn action(offset_ms: i64, event_type: EventType, id: &str, detail: &str) -> ActionRecord {
    ActionRecord {
        timestamp_millis: T0 + offset_ms,
        event_type,
        action_id: id.into(),
        detail: detail.into(),
    }
}

pub struct Fixture<'a> {
    pub user: &'a str,
    pub task: &'a str,
    pub language: &'a str,
    pub index: u64,
    pub survey: SurveyInfo,
    pub snapshots: Vec<SnapshotRecord>,
    pub actions: Vec<ActionRecord>,
}

impl Fixture<'_> {
    pub fn write(&self, root: &Path) -> PathBuf {
        let dir = root
            .join(self.user)
            .join(self.task)
            .join(self.index.to_string());
        fs::create_dir_all(&dir).unwrap();
        let mut snapshots = self.snapshots.clone();
        for s in &mut snapshots {
            s.language = self.language.into();
        }
        fs::write(dir.join("snapshots.csv"), encode_snapshots(&snapshots)).unwrap();
        fs::write(dir.join("actions.csv"), encode_actions(&self.actions)).unwrap();
        let meta = SubmissionMeta {
            user_id: self.user.into(),
            task_key: self.task.into(),
            language: self.language.into(),
            submission_index: self.index,
            received_at_millis: T0 + 1_000_000 + self.index as i64,
            survey: self.survey.clone(),
        };
        fs::write(dir.join("meta.json"), serde_json::to_vec_pretty(&meta).unwrap()).unwrap();
        dir
    }
}

/// Submission with a single snapshot holding `code`.
pub fn single<'a>(user: &'a str, task: &'a str, index: u64, age: i32, code: &str) -> Fixture<'a> {
    Fixture {
        user,
        task,
        language: "python",
        index,
        survey: survey(age, "RU"),
        snapshots: vec![snapshot(0, task, code)],
        actions: vec![],
    }
}

pub fn user_id(n: u32) -> String {
    format!("00000000-0000-4000-8000-{n:012}")
}

/// Every file under `root` with its contents and modification time.
pub fn snapshot_tree(root: &Path) -> BTreeMap<PathBuf, (Vec<u8>, std::time::SystemTime)> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let entry = entry.unwrap();
            let path = entry.path();
            let meta = entry.metadata().unwrap();
            if meta.is_dir() {
                stack.push(path.clone());
                out.insert(path, (Vec::new(), meta.modified().unwrap()));
            } else {
                out.insert(path.clone(), (fs::read(&path).unwrap(), meta.modified().unwrap()));
            }
        }
    }
    out
}
