//! Append-only CSV logs of one task attempt:
//! `<dataDir>/logs/<taskKey>/<n>/{snapshots.csv,actions.csv}`.
//!
//! Every record is written with a single `write_all` of the full row, so a
//! killed process loses at most the row it was writing. [`AttemptLog::open`]
//! cuts such a torn tail off before appending again.

use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use codetrail_core::csv::{decode, encode_row, header_line, CsvRecord};
use codetrail_core::session::{ACTIONS_FILE, SNAPSHOTS_FILE};
use codetrail_core::{ActionRecord, SnapshotRecord};

pub struct AttemptLog {
    dir: PathBuf,
    snapshots: File,
    actions: File,
    snapshot_count: usize,
    action_count: usize,
}

/// What survived in an existing log.
pub struct Recovered {
    pub snapshots: Vec<SnapshotRecord>,
    pub actions: Vec<ActionRecord>,
}

/// Next unused attempt number under `logs/<taskKey>`.
pub fn next_attempt(task_logs: &Path) -> io::Result<u64> {
    let mut next = 0;
    match fs::read_dir(task_logs) {
        Ok(entries) => {
            for entry in entries {
                if let Some(n) = entry?.file_name().to_str().and_then(|s| s.parse::<u64>().ok()) {
                    next = next.max(n + 1);
                }
            }
        }
        Err(e) if e.kind() == io::ErrorKind::NotFound => {}
        Err(e) => return Err(e),
    }
    Ok(next)
}

fn open_append(path: &Path) -> io::Result<File> {
    OpenOptions::new().append(true).open(path)
}

/// Longest prefix of `text` that decodes as complete records.
fn recover<R: CsvRecord>(path: &Path) -> io::Result<Vec<R>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => String::new(),
        Err(e) => return Err(e),
    };
    if let Ok(records) = decode::<R>(&text) {
        if text.ends_with('\n') {
            return Ok(records);
        }
    }
    let header = header_line::<R>();
    let mut cut = text.len();
    let records = loop {
        match text[..cut].rfind('\n') {
            Some(lf) if lf + 1 >= header.len() => {
                let prefix = &text[..=lf];
                if let Ok(records) = decode::<R>(prefix) {
                    cut = lf + 1;
                    break records;
                }
                cut = lf;
            }
            _ => {
                cut = 0;
                break Vec::new();
            }
        }
    };
    if cut == 0 {
        fs::write(path, header)?;
    } else {
        let f = OpenOptions::new().write(true).open(path)?;
        f.set_len(cut as u64)?;
    }
    tracing::warn!("{}: dropped a torn record tail", path.display());
    Ok(records)
}

impl AttemptLog {
    /// Starts a fresh attempt directory with header-only files.
    pub fn create(dir: &Path) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(SNAPSHOTS_FILE), header_line::<SnapshotRecord>())?;
        fs::write(dir.join(ACTIONS_FILE), header_line::<ActionRecord>())?;
        Ok(AttemptLog {
            dir: dir.to_path_buf(),
            snapshots: open_append(&dir.join(SNAPSHOTS_FILE))?,
            actions: open_append(&dir.join(ACTIONS_FILE))?,
            snapshot_count: 0,
            action_count: 0,
        })
    }

    /// Reopens an attempt left by an earlier process.
    pub fn open(dir: &Path) -> io::Result<(Self, Recovered)> {
        let snapshots: Vec<SnapshotRecord> = recover(&dir.join(SNAPSHOTS_FILE))?;
        let actions: Vec<ActionRecord> = recover(&dir.join(ACTIONS_FILE))?;
        let log = AttemptLog {
            dir: dir.to_path_buf(),
            snapshots: open_append(&dir.join(SNAPSHOTS_FILE))?,
            actions: open_append(&dir.join(ACTIONS_FILE))?,
            snapshot_count: snapshots.len(),
            action_count: actions.len(),
        };
        Ok((log, Recovered { snapshots, actions }))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn snapshot_count(&self) -> usize {
        self.snapshot_count
    }

    pub fn action_count(&self) -> usize {
        self.action_count
    }

    pub fn append_snapshot(&mut self, record: &SnapshotRecord) -> io::Result<()> {
        self.snapshots.write_all(encode_row(record).as_bytes())?;
        self.snapshot_count += 1;
        Ok(())
    }

    pub fn append_action(&mut self, record: &ActionRecord) -> io::Result<()> {
        self.actions.write_all(encode_row(record).as_bytes())?;
        self.action_count += 1;
        Ok(())
    }

    /// The exact bytes on disk, as uploaded.
    pub fn read_files(&self) -> io::Result<(Vec<u8>, Vec<u8>)> {
        Ok((
            fs::read(self.dir.join(SNAPSHOTS_FILE))?,
            fs::read(self.dir.join(ACTIONS_FILE))?,
        ))
    }
}
