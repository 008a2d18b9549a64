use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use codetrail_core::runner::{RunnerConfig, DEFAULT_TIMEOUT_MILLIS};
use serde::{Deserialize, Serialize};

pub const DEFAULT_PORT: u16 = 9271;
pub const DEFAULT_POLL_MILLIS: u64 = 200;

fn default_port() -> u16 {
    DEFAULT_PORT
}

fn default_poll() -> u64 {
    DEFAULT_POLL_MILLIS
}

fn default_run_timeout() -> u64 {
    DEFAULT_TIMEOUT_MILLIS
}

fn default_extensions() -> BTreeMap<String, String> {
    [("python", "py"), ("java", "java"), ("kotlin", "kt"), ("cpp", "cpp")]
        .into_iter()
        .map(|(l, e)| (l.to_string(), e.to_string()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TrackerConfig {
    pub data_dir: PathBuf,
    pub server_url: String,
    #[serde(default = "default_port")]
    pub local_port: u16,
    #[serde(default = "default_poll")]
    pub poll_millis: u64,
    #[serde(default = "default_run_timeout")]
    pub run_timeout_millis: u64,
    /// Command template per language, e.g. `"python3 {file}"`.
    #[serde(default)]
    pub runners: BTreeMap<String, String>,
    /// Task set used when the server cannot be reached at startup.
    #[serde(default)]
    pub tasks_fallback_path: Option<PathBuf>,
    /// Draft file extension per language. Languages missing here cannot be selected.
    #[serde(default = "default_extensions")]
    pub extensions: BTreeMap<String, String>,
    /// Directory with the panel's static files served at `/`.
    #[serde(default)]
    pub panel_dir: Option<PathBuf>,
}

impl TrackerConfig {
    pub fn new(data_dir: impl Into<PathBuf>, server_url: impl Into<String>) -> Self {
        TrackerConfig {
            data_dir: data_dir.into(),
            server_url: server_url.into(),
            local_port: DEFAULT_PORT,
            poll_millis: DEFAULT_POLL_MILLIS,
            run_timeout_millis: DEFAULT_TIMEOUT_MILLIS,
            runners: BTreeMap::new(),
            tasks_fallback_path: None,
            extensions: default_extensions(),
            panel_dir: None,
        }
    }

    /// Reads a JSON config. Relative paths are resolved against the
    /// directory containing the file.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut config: TrackerConfig = serde_json::from_str(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut config.data_dir);
        if let Some(p) = config.tasks_fallback_path.as_mut() {
            resolve(p);
        }
        if let Some(p) = config.panel_dir.as_mut() {
            resolve(p);
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        for language in self.runners.keys() {
            self.runner_for(language)
                .expect("listed runner")
                .validate()
                .map_err(|e| anyhow::anyhow!("runner for {language}: {e}"))?;
        }
        if self.poll_millis == 0 {
            anyhow::bail!("pollMillis must be positive");
        }
        Ok(())
    }

    pub fn runner_for(&self, language: &str) -> Option<RunnerConfig> {
        self.runners.get(language).map(|template| RunnerConfig {
            timeout_millis: self.run_timeout_millis,
            ..RunnerConfig::new(template.clone())
        })
    }
}
