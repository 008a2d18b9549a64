#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use codetrail_core::{Experience, SurveyInfo};
use codetrail_server::{serve, AppState, ConfigSources, Storage};
use codetrail_tracker::TrackerConfig;
use tempfile::TempDir;

/// Nothing listens on port 1.
pub const DEAD_SERVER: &str = "http://127.0.0.1:1";

pub fn config_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../config")
}

pub fn reference(task: &str) -> String {
    std::fs::read_to_string(config_dir().join("reference").join(format!("{task}.py"))).unwrap()
}

pub struct TestServer {
    pub url: String,
    pub storage: PathBuf,
    _dir: TempDir,
}

pub async fn start_server() -> TestServer {
    let dir = tempfile::tempdir().unwrap();
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    start_server_on(listener, dir, url).await
}

pub async fn start_server_on(listener: tokio::net::TcpListener, dir: TempDir, url: String) -> TestServer {
    let storage = dir.path().join("store");
    let state = AppState::new(
        ConfigSources {
            tasks: Some(config_dir().join("tasks.json")),
            translations: Some(config_dir().join("ui.json")),
        },
        Storage::open(&storage).unwrap(),
    )
    .unwrap();
    tokio::spawn(serve(listener, state));
    TestServer {
        url,
        storage,
        _dir: dir,
    }
}

pub fn tracker_config(data_dir: &Path, server_url: &str) -> TrackerConfig {
    let mut config = TrackerConfig::new(data_dir, server_url);
    config.poll_millis = 50;
    config.run_timeout_millis = 5_000;
    config.tasks_fallback_path = Some(config_dir().join("tasks.json"));
    config
        .runners
        .insert("python".into(), "python3 {file}".into());
    config
}

pub fn survey() -> SurveyInfo {
    SurveyInfo {
        gender: "male".into(),
        age: 15,
        country: "DE".into(),
        experience: Experience::LessThanHalfYear,
    }
}

/// Polls `cond` every 5 ms until it holds or `limit` passes.
pub fn wait_until(limit: Duration, mut cond: impl FnMut() -> bool) -> Option<Duration> {
    let start = Instant::now();
    loop {
        if cond() {
            return Some(start.elapsed());
        }
        if start.elapsed() > limit {
            return None;
        }
        std::thread::sleep(Duration::from_millis(5));
    }
}

/// Replaces `path` with `content` in one step, as editors with safe-save do.
pub fn atomic_write(path: &Path, content: &str) {
    let tmp = path.with_extension("swp");
    std::fs::write(&tmp, content).unwrap();
    std::fs::rename(tmp, path).unwrap();
}
