//! Watches exactly one draft file.
//!
//! Native change events on the parent directory are filtered down to the
//! draft's file name; a polling thread re-reads the file every interval so
//! writes are observed even where native events are missing. Both paths hand
//! the full file text to the same callback, which deduplicates.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use notify::event::{AccessKind, AccessMode};
use notify::{Event, EventKind, RecommendedWatcher, RecursiveMode, Watcher};

pub type OnContent = Arc<dyn Fn(String) + Send + Sync>;

pub struct DraftWatcher {
    stop: Arc<AtomicBool>,
    _native: Option<RecommendedWatcher>,
}

/// Full text of the draft, or `None` while it is missing or being replaced.
pub fn read_draft(path: &Path) -> Option<String> {
    std::fs::read(path)
        .ok()
        .map(|bytes| String::from_utf8_lossy(&bytes).into_owned())
}

fn is_write(kind: &EventKind) -> bool {
    matches!(
        kind,
        EventKind::Create(_)
            | EventKind::Modify(_)
            | EventKind::Access(AccessKind::Close(AccessMode::Write))
    )
}

impl DraftWatcher {
    pub fn start(draft: &Path, poll: Duration, on_content: OnContent) -> Self {
        let stop = Arc::new(AtomicBool::new(false));
        let draft: PathBuf = draft.to_path_buf();

        let native = native_watcher(&draft, on_content.clone(), stop.clone());

        let poll_stop = stop.clone();
        thread::Builder::new()
            .name("draft-poll".into())
            .spawn(move || {
                while !poll_stop.load(Ordering::Acquire) {
                    thread::sleep(poll);
                    if poll_stop.load(Ordering::Acquire) {
                        break;
                    }
                    if let Some(text) = read_draft(&draft) {
                        on_content(text);
                    }
                }
            })
            .expect("spawn poll thread");

        DraftWatcher {
            stop,
            _native: native,
        }
    }
}

fn native_watcher(draft: &Path, on_content: OnContent, stop: Arc<AtomicBool>) -> Option<RecommendedWatcher> {
    let dir = draft.parent()?.to_path_buf();
    let name = draft.file_name()?.to_os_string();
    let target = draft.to_path_buf();
    let handler = move |res: notify::Result<Event>| {
        let Ok(event) = res else { return };
        if stop.load(Ordering::Acquire) || !is_write(&event.kind) {
            return;
        }
        if event.paths.iter().any(|p| p.file_name() == Some(name.as_os_str())) {
            if let Some(text) = read_draft(&target) {
                on_content(text);
            }
        }
    };
    let mut watcher = match notify::recommended_watcher(handler) {
        Ok(w) => w,
        Err(e) => {
            tracing::warn!("native file events unavailable, polling only: {e}");
            return None;
        }
    };
    if let Err(e) = watcher.watch(&dir, RecursiveMode::NonRecursive) {
        tracing::warn!("cannot watch {}, polling only: {e}", dir.display());
        return None;
    }
    Some(watcher)
}

impl Drop for DraftWatcher {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::Release);
    }
}
