use std::fs::{self, OpenOptions};
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, MutexGuard, Weak};
use std::time::Duration;

use codetrail_core::runner::{expand_template, run_command, template_vars, RunResult};
use codetrail_core::tasks::{find_task, load_task_set};
use codetrail_core::{
    now_millis, ActionRecord, EventType, SnapshotRecord, SubmissionReceipt, SurveyInfo, TaskSpec,
};
use serde::{Deserialize, Serialize};

use crate::client::{build_upload, ServerClient};
use crate::config::TrackerConfig;
use crate::error::TrackerError;
use crate::log::{next_attempt, AttemptLog};
use crate::watcher::{read_draft, DraftWatcher};

const SURVEY_FILE: &str = "survey.json";
const USER_FILE: &str = "user-id";
const ACTIVE_FILE: &str = "active.json";

pub const TASK_SELECTED: &str = "TaskSelected";
pub const SESSION_RESUMED: &str = "SessionResumed";
pub const RUN_ACTION: &str = "Run";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    NeedsSurvey,
    Idle,
    Solving,
    Submitting,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ActiveTask {
    pub task_key: String,
    pub language: String,
    pub draft_file_path: PathBuf,
}

/// Observable daemon state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionState {
    pub phase: Phase,
    pub survey: Option<SurveyInfo>,
    pub active_task: Option<ActiveTask>,
    pub server_url: String,
    pub user_id: Option<String>,
    /// Records captured so far in the active attempt.
    #[serde(default)]
    pub snapshot_count: usize,
    #[serde(default)]
    pub action_count: usize,
}

/// Marker of an attempt in progress, so a restarted daemon resumes it.
#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct ActiveFile {
    task_key: String,
    language: String,
    attempt: u64,
}

struct Session {
    id: u64,
    task: ActiveTask,
    file_name: String,
    log: AttemptLog,
    last_fragment: Option<String>,
    _watcher: Option<DraftWatcher>,
}

struct State {
    phase: Phase,
    survey: Option<SurveyInfo>,
    user_id: Option<String>,
    tasks: Vec<TaskSpec>,
    session: Option<Session>,
    /// Last issued timestamp; the daemon clock never goes backwards.
    clock: i64,
    sessions_started: u64,
}

impl State {
    fn tick(&mut self) -> i64 {
        self.clock = self.clock.max(now_millis());
        self.clock
    }

    fn expect_phase(&self, allowed: &[Phase]) -> Result<(), TrackerError> {
        if allowed.contains(&self.phase) {
            Ok(())
        } else {
            Err(TrackerError::InvalidPhase { actual: self.phase })
        }
    }

    fn session_mut(&mut self) -> Result<&mut Session, TrackerError> {
        let phase = self.phase;
        self.session
            .as_mut()
            .ok_or(TrackerError::InvalidPhase { actual: phase })
    }

    /// Appends a snapshot unless `content` equals the last captured fragment.
    fn capture(&mut self, content: String) -> Result<Option<SnapshotRecord>, TrackerError> {
        let timestamp_millis = self.tick();
        let session = self.session_mut()?;
        if session.last_fragment.as_deref() == Some(content.as_str()) {
            return Ok(None);
        }
        let record = SnapshotRecord {
            timestamp_millis,
            task_key: session.task.task_key.clone(),
            language: session.task.language.clone(),
            file_name: session.file_name.clone(),
            fragment: content,
        };
        session.log.append_snapshot(&record)?;
        session.last_fragment = Some(record.fragment.clone());
        Ok(Some(record))
    }

    fn capture_draft(&mut self) -> Result<Option<SnapshotRecord>, TrackerError> {
        let path = self.session_mut()?.task.draft_file_path.clone();
        match read_draft(&path) {
            Some(text) => self.capture(text),
            None => Ok(None),
        }
    }

    fn record_action(
        &mut self,
        event_type: EventType,
        action_id: &str,
        detail: &str,
    ) -> Result<ActionRecord, TrackerError> {
        let timestamp_millis = self.tick();
        let record = ActionRecord {
            timestamp_millis,
            event_type,
            action_id: action_id.to_string(),
            detail: detail.to_string(),
        };
        self.session_mut()?.log.append_action(&record)?;
        Ok(record)
    }
}

struct Shared {
    config: TrackerConfig,
    client: ServerClient,
    state: Mutex<State>,
}

/// Handle to a running tracker. Clones share the same state.
#[derive(Clone)]
pub struct Tracker {
    shared: Arc<Shared>,
}

fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(tmp, path)
}

fn read_optional(path: &Path) -> io::Result<Option<String>> {
    match fs::read_to_string(path) {
        Ok(text) => Ok(Some(text)),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e),
    }
}

impl Tracker {
    /// Loads local state and the task set. Falls back to the configured
    /// local task file when the server cannot be reached.
    pub async fn start(config: TrackerConfig) -> Result<Self, TrackerError> {
        fs::create_dir_all(config.data_dir.join("solutions"))?;
        fs::create_dir_all(config.data_dir.join("logs"))?;

        let survey = match read_optional(&config.data_dir.join(SURVEY_FILE))? {
            Some(text) => Some(
                serde_json::from_str::<SurveyInfo>(&text)
                    .map_err(|e| TrackerError::Corrupt(format!("{SURVEY_FILE}: {e}")))?,
            ),
            None => None,
        };
        let user_id = read_optional(&config.data_dir.join(USER_FILE))?
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty());

        let client = ServerClient::new(&config.server_url);
        let tasks = match client.tasks().await {
            Ok(tasks) => tasks,
            Err(e) => match &config.tasks_fallback_path {
                Some(path) => {
                    tracing::warn!("{e}; using local task set {}", path.display());
                    load_task_set(path).map_err(|e| TrackerError::Corrupt(e.to_string()))?
                }
                None => return Err(e),
            },
        };

        let phase = if survey.is_some() {
            Phase::Idle
        } else {
            Phase::NeedsSurvey
        };
        let tracker = Tracker {
            shared: Arc::new(Shared {
                config,
                client,
                state: Mutex::new(State {
                    phase,
                    survey,
                    user_id,
                    tasks,
                    session: None,
                    clock: 0,
                    sessions_started: 0,
                }),
            }),
        };
        if phase == Phase::Idle {
            tracker.resume()?;
        }
        Ok(tracker)
    }

    fn lock(&self) -> MutexGuard<'_, State> {
        self.shared.state.lock().expect("tracker state lock")
    }

    fn config(&self) -> &TrackerConfig {
        &self.shared.config
    }

    fn data_path(&self, name: &str) -> PathBuf {
        self.config().data_dir.join(name)
    }

    pub fn state(&self) -> SessionState {
        let state = self.lock();
        SessionState {
            phase: state.phase,
            survey: state.survey.clone(),
            active_task: state.session.as_ref().map(|s| s.task.clone()),
            server_url: self.config().server_url.clone(),
            user_id: state.user_id.clone(),
            snapshot_count: state.session.as_ref().map_or(0, |s| s.log.snapshot_count()),
            action_count: state.session.as_ref().map_or(0, |s| s.log.action_count()),
        }
    }

    pub fn tasks(&self) -> Vec<TaskSpec> {
        self.lock().tasks.clone()
    }

    /// Log directory of the active attempt.
    pub fn attempt_dir(&self) -> Option<PathBuf> {
        self.lock().session.as_ref().map(|s| s.log.dir().to_path_buf())
    }

    pub fn submit_survey(&self, survey: SurveyInfo) -> Result<SessionState, TrackerError> {
        survey
            .validate()
            .map_err(|e| TrackerError::InvalidSurvey(e.to_string()))?;
        {
            let mut state = self.lock();
            state.expect_phase(&[Phase::NeedsSurvey])?;
            let json = serde_json::to_vec_pretty(&survey).expect("survey serializes");
            write_atomic(&self.data_path(SURVEY_FILE), &json)?;
            state.survey = Some(survey);
            state.phase = Phase::Idle;
        }
        Ok(self.state())
    }

    fn draft_path(&self, task_key: &str, language: &str) -> Option<PathBuf> {
        let ext = self.config().extensions.get(language)?;
        Some(
            self.config()
                .data_dir
                .join("solutions")
                .join(format!("{task_key}.{ext}")),
        )
    }

    /// Opens the draft of a task and starts tracking it. Selecting while
    /// another task is active switches tasks; the abandoned attempt stays on
    /// disk unsubmitted.
    pub fn select_task(&self, task_key: &str, language: &str) -> Result<SessionState, TrackerError> {
        {
            let mut state = self.lock();
            state.expect_phase(&[Phase::Idle, Phase::Solving])?;
            let task = find_task(&state.tasks, task_key)
                .ok_or_else(|| TrackerError::UnknownTask(task_key.to_string()))?;
            let draft = match self.draft_path(task_key, language) {
                Some(path) if task.supports(language) => path,
                _ => {
                    return Err(TrackerError::UnsupportedLanguage {
                        task: task_key.to_string(),
                        language: language.to_string(),
                    })
                }
            };
            OpenOptions::new().create(true).append(true).open(&draft)?;

            let task_logs = self.config().data_dir.join("logs").join(task_key);
            let attempt = next_attempt(&task_logs)?;
            let log = AttemptLog::create(&task_logs.join(attempt.to_string()))?;
            let marker = ActiveFile {
                task_key: task_key.to_string(),
                language: language.to_string(),
                attempt,
            };
            write_atomic(
                &self.data_path(ACTIVE_FILE),
                &serde_json::to_vec(&marker).expect("marker serializes"),
            )?;

            state.session = None;
            self.install_session(&mut state, task_key, language, draft, log, None);
            state.record_action(EventType::Lifecycle, TASK_SELECTED, language)?;
            state.capture_draft()?;
            state.phase = Phase::Solving;
        }
        Ok(self.state())
    }

    fn install_session(
        &self,
        state: &mut State,
        task_key: &str,
        language: &str,
        draft: PathBuf,
        log: AttemptLog,
        last_fragment: Option<String>,
    ) {
        state.sessions_started += 1;
        let id = state.sessions_started;
        let weak: Weak<Shared> = Arc::downgrade(&self.shared);
        let watcher = DraftWatcher::start(
            &draft,
            Duration::from_millis(self.config().poll_millis),
            Arc::new(move |text| {
                if let Some(shared) = weak.upgrade() {
                    Tracker { shared }.observed(id, text);
                }
            }),
        );
        state.session = Some(Session {
            id,
            task: ActiveTask {
                task_key: task_key.to_string(),
                language: language.to_string(),
                draft_file_path: draft.clone(),
            },
            file_name: draft
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default(),
            log,
            last_fragment,
            _watcher: Some(watcher),
        });
    }

    /// Watcher entry point. Content for a session that has ended, or arriving
    /// while a submission is in flight, is dropped.
    fn observed(&self, session_id: u64, text: String) {
        let mut state = self.lock();
        if state.phase != Phase::Solving || state.session.as_ref().map(|s| s.id) != Some(session_id) {
            return;
        }
        if let Err(e) = state.capture(text) {
            tracing::error!("cannot record snapshot: {e}");
        }
    }

    /// Picks up an attempt left in progress by an earlier process.
    fn resume(&self) -> Result<(), TrackerError> {
        let path = self.data_path(ACTIVE_FILE);
        let Some(text) = read_optional(&path)? else {
            return Ok(());
        };
        let marker: ActiveFile = serde_json::from_str(&text)
            .map_err(|e| TrackerError::Corrupt(format!("{ACTIVE_FILE}: {e}")))?;
        let mut state = self.lock();
        let known = find_task(&state.tasks, &marker.task_key)
            .is_some_and(|t| t.supports(&marker.language));
        let draft = self.draft_path(&marker.task_key, &marker.language);
        let (true, Some(draft)) = (known, draft) else {
            tracing::warn!("dropping unfinished attempt for unavailable task {:?}", marker.task_key);
            fs::remove_file(&path)?;
            return Ok(());
        };
        let dir = self
            .config()
            .data_dir
            .join("logs")
            .join(&marker.task_key)
            .join(marker.attempt.to_string());
        let (log, recovered) = AttemptLog::open(&dir)?;
        let last_ts = recovered
            .snapshots
            .iter()
            .map(|s| s.timestamp_millis)
            .chain(recovered.actions.iter().map(|a| a.timestamp_millis))
            .max()
            .unwrap_or(0);
        state.clock = state.clock.max(last_ts);
        let last_fragment = recovered.snapshots.last().map(|s| s.fragment.clone());
        OpenOptions::new().create(true).append(true).open(&draft)?;
        self.install_session(&mut state, &marker.task_key, &marker.language, draft, log, last_fragment);
        state.record_action(EventType::Lifecycle, SESSION_RESUMED, &marker.language)?;
        state.capture_draft()?;
        state.phase = Phase::Solving;
        Ok(())
    }

    /// Records the given full draft text as observed now.
    pub fn capture_change(&self, content: String) -> Result<Option<SnapshotRecord>, TrackerError> {
        let mut state = self.lock();
        state.expect_phase(&[Phase::Solving])?;
        state.capture(content)
    }

    pub fn ingest_event(
        &self,
        event_type: EventType,
        action_id: &str,
        detail: &str,
    ) -> Result<ActionRecord, TrackerError> {
        if action_id.trim().is_empty() {
            return Err(TrackerError::InvalidEvent("actionId is empty".into()));
        }
        let mut state = self.lock();
        state.expect_phase(&[Phase::Solving])?;
        state.record_action(event_type, action_id, detail)
    }

    /// Runs the draft with the language's command template. Blocks until the
    /// program exits or the timeout kills it.
    pub fn run_solution(&self, stdin: Option<&str>) -> Result<RunResult, TrackerError> {
        let (session_id, draft, runner) = {
            let mut state = self.lock();
            state.expect_phase(&[Phase::Solving])?;
            let session = state.session_mut()?;
            let language = session.task.language.clone();
            let runner = self
                .config()
                .runner_for(&language)
                .ok_or(TrackerError::RunnerMissing(language))?;
            let out = (session.id, session.task.draft_file_path.clone(), runner);
            // The snapshot that is about to run precedes its Run record.
            state.capture_draft()?;
            out
        };
        let workdir = tempfile::tempdir()?;
        let argv = expand_template(&runner.command_template, &template_vars(&draft, workdir.path()))?;
        let result = run_command(&argv, stdin.unwrap_or(""), workdir.path(), runner.timeout())?;

        let mut state = self.lock();
        if state.phase == Phase::Solving && state.session.as_ref().map(|s| s.id) == Some(session_id) {
            state.record_action(EventType::Run, RUN_ACTION, &format!("exit={}", result.exit_code))?;
        }
        Ok(result)
    }

    async fn ensure_user(&self) -> Result<String, TrackerError> {
        if let Some(id) = self.lock().user_id.clone() {
            return Ok(id);
        }
        let id = self.shared.client.register_user().await?;
        write_atomic(&self.data_path(USER_FILE), format!("{id}\n").as_bytes())?;
        self.lock().user_id = Some(id.clone());
        Ok(id)
    }

    /// Uploads the active attempt. On failure the session stays open with
    /// its data intact and submitting again retries.
    pub async fn submit(&self) -> Result<SubmissionReceipt, TrackerError> {
        let (session_id, task, survey, snapshots, actions) = {
            let mut state = self.lock();
            state.expect_phase(&[Phase::Solving])?;
            state.capture_draft()?;
            let survey = state.survey.clone().ok_or(TrackerError::InvalidPhase {
                actual: Phase::NeedsSurvey,
            })?;
            let session = state.session_mut()?;
            if session.log.snapshot_count() == 0 {
                return Err(TrackerError::NothingToSubmit);
            }
            let (snapshots, actions) = session.log.read_files()?;
            let out = (session.id, session.task.clone(), survey, snapshots, actions);
            state.phase = Phase::Submitting;
            out
        };

        let outcome = async {
            let user_id = self.ensure_user().await?;
            let payload = build_upload(
                &user_id,
                &task.task_key,
                &task.language,
                &survey,
                &snapshots,
                &actions,
            );
            self.shared.client.upload(payload).await
        }
        .await;

        let mut state = self.lock();
        debug_assert_eq!(state.session.as_ref().map(|s| s.id), Some(session_id));
        match outcome {
            Ok(receipt) => {
                state.session = None;
                state.phase = Phase::Idle;
                match fs::remove_file(self.data_path(ACTIVE_FILE)) {
                    Err(e) if e.kind() != io::ErrorKind::NotFound => return Err(e.into()),
                    _ => {}
                }
                Ok(receipt)
            }
            Err(e) => {
                state.phase = Phase::Solving;
                // Edits made while the upload was in flight.
                if let Err(capture_err) = state.capture_draft() {
                    tracing::error!("cannot record snapshot: {capture_err}");
                }
                Err(e)
            }
        }
    }
}
