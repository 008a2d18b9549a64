use std::path::{Path, PathBuf};
use std::time::Duration;

use codetrail_core::tasks::load_task_set;
use codetrail_core::{Experience, SurveyInfo, TaskSpec};
use codetrail_postprocess::Runners;
use codetrail_server::{serve, AppState, ConfigSources, Storage};
use codetrail_tracker::TrackerConfig;
use tempfile::TempDir;

pub fn config_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config")
}

pub fn reference(task: &str) -> String {
    std::fs::read_to_string(config_dir().join("reference").join(format!("{task}.py"))).unwrap()
}

pub fn tasks() -> Vec<TaskSpec> {
    load_task_set(&config_dir().join("tasks.json")).unwrap()
}

pub fn runners() -> Runners {
    Runners::load(&config_dir().join("runners.json")).unwrap()
}

pub fn runtime() -> tokio::runtime::Runtime {
    tokio::runtime::Builder::new_multi_thread().enable_all().build().unwrap()
}

pub fn survey() -> SurveyInfo {
    SurveyInfo {
        gender: "female".into(),
        age: 19,
        country: "RU".into(),
        experience: Experience::OneToTwoYears,
    }
}

pub struct TestServer {
    pub url: String,
    pub storage: PathBuf,
    _dir: TempDir,
}

/// Must be called inside a runtime.
pub async fn start_server() -> TestServer {
    let dir = tempfile::tempdir().unwrap();
    let storage = dir.path().join("store");
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
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
    config.runners.insert("python".into(), "python3 {file}".into());
    config
}

/// Replaces `path` in one rename, as editors with safe-save do.
pub fn atomic_write(path: &Path, content: &str) {
    let tmp = path.with_extension("swp");
    std::fs::write(&tmp, content).unwrap();
    std::fs::rename(tmp, path).unwrap();
}

pub async fn settle() {
    tokio::time::sleep(Duration::from_millis(120)).await;
}
