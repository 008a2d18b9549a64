//! Filesystem submission store.
//!
//! The on-disk layout is the export layout:
//! `<root>/<userId>/<taskKey>/<submissionIndex>/{snapshots.csv,actions.csv,meta.json}`.
//! Issued user ids are appended to `<root>/users.txt`. A submission is
//! written into `<root>/.staging/` first and renamed into place, so readers
//! never observe a partial folder.

use std::collections::{HashMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{self, Cursor, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use codetrail_core::session::{SubmissionMeta, ACTIONS_FILE, META_FILE, SNAPSHOTS_FILE};
use thiserror::Error;
use uuid::Uuid;
use zip::write::SimpleFileOptions;
use zip::ZipWriter;

const USERS_FILE: &str = "users.txt";
const STAGING_DIR: &str = ".staging";

#[derive(Debug, Error)]
pub enum StorageError {
    #[error("storage i/o failure: {0}")]
    Io(#[from] io::Error),
    #[error("archive failure: {0}")]
    Zip(#[from] zip::result::ZipError),
}

/// Identifies one stored submission.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubmissionKey {
    pub user_id: String,
    pub task_key: String,
    pub index: u64,
}

impl SubmissionKey {
    pub fn relative_dir(&self) -> PathBuf {
        Path::new(&self.user_id)
            .join(&self.task_key)
            .join(self.index.to_string())
    }
}

pub struct NewSubmission<'a> {
    pub user_id: &'a str,
    pub task_key: &'a str,
    pub language: &'a str,
    pub snapshots_csv: &'a [u8],
    pub actions_csv: &'a [u8],
    pub survey: codetrail_core::SurveyInfo,
    pub received_at_millis: i64,
}

pub struct Storage {
    root: PathBuf,
    users: Mutex<Users>,
    /// Next submission index per (userId, taskKey).
    counters: Mutex<HashMap<(String, String), u64>>,
}

struct Users {
    ids: HashSet<String>,
    log: File,
}

fn is_uuid(name: &str) -> bool {
    Uuid::parse_str(name).is_ok()
}

impl Storage {
    /// Opens (or creates) a store, recovering user ids and counters from disk.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StorageError> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        let staging = root.join(STAGING_DIR);
        if staging.exists() {
            fs::remove_dir_all(&staging)?;
        }
        fs::create_dir_all(&staging)?;

        let users_path = root.join(USERS_FILE);
        let mut ids: HashSet<String> = match fs::read_to_string(&users_path) {
            Ok(text) => text.lines().filter(|l| !l.is_empty()).map(String::from).collect(),
            Err(e) if e.kind() == io::ErrorKind::NotFound => HashSet::new(),
            Err(e) => return Err(e.into()),
        };

        let mut counters = HashMap::new();
        for key in scan(&root)? {
            ids.insert(key.user_id.clone());
            let next = counters
                .entry((key.user_id, key.task_key))
                .or_insert(0u64);
            *next = (*next).max(key.index + 1);
        }

        let log = OpenOptions::new().create(true).append(true).open(&users_path)?;
        Ok(Storage {
            root,
            users: Mutex::new(Users { ids, log }),
            counters: Mutex::new(counters),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Issues a fresh random id and records it before returning.
    pub fn register_user(&self) -> Result<String, StorageError> {
        let mut users = self.users.lock().expect("users lock");
        let id = loop {
            let candidate = Uuid::new_v4().to_string();
            if !users.ids.contains(&candidate) {
                break candidate;
            }
        };
        users.log.write_all(format!("{id}\n").as_bytes())?;
        users.ids.insert(id.clone());
        Ok(id)
    }

    pub fn has_user(&self, id: &str) -> bool {
        self.users.lock().expect("users lock").ids.contains(id)
    }

    pub fn user_count(&self) -> usize {
        self.users.lock().expect("users lock").ids.len()
    }

    /// Stores a validated submission under the next index for its
    /// (user, task) pair and returns that index.
    pub fn store(&self, sub: NewSubmission<'_>) -> Result<u64, StorageError> {
        let staging = self.root.join(STAGING_DIR).join(Uuid::new_v4().to_string());
        fs::create_dir(&staging)?;
        let result = self.store_staged(&staging, sub);
        if result.is_err() {
            let _ = fs::remove_dir_all(&staging);
        }
        result
    }

    fn store_staged(&self, staging: &Path, sub: NewSubmission<'_>) -> Result<u64, StorageError> {
        write_synced(&staging.join(SNAPSHOTS_FILE), sub.snapshots_csv)?;
        write_synced(&staging.join(ACTIONS_FILE), sub.actions_csv)?;

        let mut counters = self.counters.lock().expect("counters lock");
        let slot = (sub.user_id.to_string(), sub.task_key.to_string());
        let index = counters.get(&slot).copied().unwrap_or(0);
        let meta = SubmissionMeta {
            user_id: sub.user_id.to_string(),
            task_key: sub.task_key.to_string(),
            language: sub.language.to_string(),
            submission_index: index,
            received_at_millis: sub.received_at_millis,
            survey: sub.survey,
        };
        let mut meta_json = serde_json::to_vec_pretty(&meta).expect("meta serializes");
        meta_json.push(b'\n');
        write_synced(&staging.join(META_FILE), &meta_json)?;

        let key = SubmissionKey {
            user_id: slot.0.clone(),
            task_key: slot.1.clone(),
            index,
        };
        let target = self.root.join(key.relative_dir());
        fs::create_dir_all(target.parent().expect("index dir has a parent"))?;
        fs::rename(staging, &target)?;
        counters.insert(slot, index + 1);
        Ok(index)
    }

    /// All stored submissions, sorted by user, task and numeric index.
    pub fn submissions(&self) -> Result<Vec<SubmissionKey>, StorageError> {
        scan(&self.root)
    }

    /// Builds a zip of every stored submission in the export layout.
    pub fn export_zip(&self) -> Result<Vec<u8>, StorageError> {
        let mut zip = ZipWriter::new(Cursor::new(Vec::new()));
        let options = SimpleFileOptions::default().compression_method(zip::CompressionMethod::Deflated);
        for key in self.submissions()? {
            let dir = self.root.join(key.relative_dir());
            for name in [SNAPSHOTS_FILE, ACTIONS_FILE, META_FILE] {
                let bytes = fs::read(dir.join(name))?;
                let entry = format!("{}/{}/{}/{}", key.user_id, key.task_key, key.index, name);
                zip.start_file(entry, options)?;
                zip.write_all(&bytes)?;
            }
        }
        Ok(zip.finish()?.into_inner())
    }
}

fn write_synced(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut f = File::create(path)?;
    f.write_all(bytes)?;
    f.sync_data()
}

fn subdirs(dir: &Path) -> io::Result<Vec<(String, PathBuf)>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        if entry.file_type()?.is_dir() {
            if let Some(name) = entry.file_name().to_str() {
                out.push((name.to_string(), entry.path()));
            }
        }
    }
    Ok(out)
}

fn scan(root: &Path) -> Result<Vec<SubmissionKey>, StorageError> {
    let mut keys = Vec::new();
    for (user_id, user_dir) in subdirs(root)? {
        if !is_uuid(&user_id) {
            continue;
        }
        for (task_key, task_dir) in subdirs(&user_dir)? {
            for (index, _) in subdirs(&task_dir)? {
                if let Ok(index) = index.parse::<u64>() {
                    keys.push(SubmissionKey {
                        user_id: user_id.clone(),
                        task_key: task_key.clone(),
                        index,
                    });
                }
            }
        }
    }
    keys.sort();
    Ok(keys)
}
