use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::extract::multipart::MultipartError;
use axum::extract::{DefaultBodyLimit, Multipart, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use codetrail_core::tasks::{find_task, load_task_set, TaskSetError};
use codetrail_core::{
    decode_actions, decode_snapshots, now_millis, SolutionSession, SubmissionReceipt, SurveyInfo,
    TaskSpec,
};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;
use tokio::net::TcpListener;

use crate::storage::{NewSubmission, Storage, StorageError};
use crate::translations::{TranslationBundle, TranslationError};

const BODY_LIMIT: usize = 64 * 1024 * 1024;

/// Where the served configuration comes from. `None` serves an empty set.
#[derive(Debug, Clone, Default)]
pub struct ConfigSources {
    pub tasks: Option<PathBuf>,
    pub translations: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error(transparent)]
    Tasks(#[from] TaskSetError),
    #[error(transparent)]
    Translations(#[from] TranslationError),
}

#[derive(Debug, Clone, Default)]
struct ServedConfig {
    tasks: Arc<Vec<TaskSpec>>,
    translations: Arc<TranslationBundle>,
}

impl ConfigSources {
    fn load(&self) -> Result<ServedConfig, ConfigError> {
        let tasks = match &self.tasks {
            Some(path) => load_task_set(path)?,
            None => Vec::new(),
        };
        let translations = match &self.translations {
            Some(path) => TranslationBundle::load(path)?,
            None => TranslationBundle::default(),
        };
        Ok(ServedConfig {
            tasks: Arc::new(tasks),
            translations: Arc::new(translations),
        })
    }
}

#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

struct Inner {
    sources: ConfigSources,
    config: RwLock<ServedConfig>,
    storage: Storage,
}

impl AppState {
    /// Loads the configuration and opens storage, failing fast on either.
    pub fn new(sources: ConfigSources, storage: Storage) -> Result<Self, ConfigError> {
        let config = sources.load()?;
        Ok(AppState {
            inner: Arc::new(Inner {
                sources,
                config: RwLock::new(config),
                storage,
            }),
        })
    }

    pub fn storage(&self) -> &Storage {
        &self.inner.storage
    }

    pub fn tasks(&self) -> Arc<Vec<TaskSpec>> {
        self.inner.config.read().expect("config lock").tasks.clone()
    }

    pub fn translations(&self) -> Arc<TranslationBundle> {
        self.inner.config.read().expect("config lock").translations.clone()
    }

    /// Re-reads both files. On failure the previous configuration stays.
    pub fn reload(&self) -> Result<(), ConfigError> {
        let fresh = self.inner.sources.load()?;
        *self.inner.config.write().expect("config lock") = fresh;
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("unknown user {0:?}")]
    UnknownUser(String),
    #[error("unknown task {0:?}")]
    UnknownTask(String),
    #[error("malformed payload: {0}")]
    MalformedPayload(String),
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("configuration reload failed: {0}")]
    Reload(#[from] ConfigError),
    #[error("storage failure: {0}")]
    Storage(#[from] StorageError),
}

impl ApiError {
    fn kind(&self) -> (StatusCode, &'static str) {
        match self {
            ApiError::UnknownUser(_) => (StatusCode::NOT_FOUND, "UnknownUser"),
            ApiError::UnknownTask(_) => (StatusCode::NOT_FOUND, "UnknownTask"),
            ApiError::MalformedPayload(_) => (StatusCode::UNPROCESSABLE_ENTITY, "MalformedPayload"),
            ApiError::BadRequest(_) => (StatusCode::BAD_REQUEST, "BadRequest"),
            ApiError::Reload(_) => (StatusCode::UNPROCESSABLE_ENTITY, "InvalidConfiguration"),
            ApiError::Storage(_) => (StatusCode::INTERNAL_SERVER_ERROR, "StorageFailure"),
        }
    }
}

impl From<MultipartError> for ApiError {
    fn from(e: MultipartError) -> Self {
        ApiError::BadRequest(e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, kind) = self.kind();
        if status.is_server_error() {
            tracing::error!("{self}");
        }
        (status, Json(json!({ "error": kind, "message": self.to_string() }))).into_response()
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/tasks", get(get_tasks))
        .route("/api/translations", get(get_translations))
        .route("/api/users", post(register_user))
        .route("/api/data", post(upload))
        .route("/api/export", get(export))
        .route("/api/admin/reload", post(reload))
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
        .with_state(state)
}

pub async fn serve(listener: TcpListener, state: AppState) -> std::io::Result<()> {
    axum::serve(listener, router(state)).await
}

async fn get_tasks(State(state): State<AppState>) -> Json<Vec<TaskSpec>> {
    Json(state.tasks().as_ref().clone())
}

async fn get_translations(State(state): State<AppState>) -> Json<TranslationBundle> {
    Json(state.translations().as_ref().clone())
}

#[derive(Serialize)]
struct NewUser {
    id: String,
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::Storage(StorageError::Io(std::io::Error::other(e))))?
}

async fn register_user(State(state): State<AppState>) -> Result<impl IntoResponse, ApiError> {
    let id = blocking(move || Ok(state.storage().register_user()?)).await?;
    Ok((StatusCode::CREATED, Json(NewUser { id })))
}

#[derive(Default)]
struct UploadForm {
    user_id: Option<String>,
    task_key: Option<String>,
    language: Option<String>,
    survey: Option<String>,
    snapshots: Option<Vec<u8>>,
    actions: Option<Vec<u8>>,
}

fn required<T>(field: Option<T>, name: &str) -> Result<T, ApiError> {
    field.ok_or_else(|| ApiError::BadRequest(format!("missing multipart field {name:?}")))
}

fn utf8(bytes: &[u8], name: &str) -> Result<String, ApiError> {
    String::from_utf8(bytes.to_vec())
        .map_err(|_| ApiError::MalformedPayload(format!("{name} is not valid UTF-8")))
}

async fn read_form(mut multipart: Multipart) -> Result<UploadForm, ApiError> {
    let mut form = UploadForm::default();
    while let Some(field) = multipart.next_field().await? {
        let name = field.name().unwrap_or_default().to_string();
        let bytes = field.bytes().await?.to_vec();
        match name.as_str() {
            "userId" => form.user_id = Some(utf8(&bytes, "userId")?),
            "taskKey" => form.task_key = Some(utf8(&bytes, "taskKey")?),
            "language" => form.language = Some(utf8(&bytes, "language")?),
            "survey" => form.survey = Some(utf8(&bytes, "survey")?),
            "snapshots" => form.snapshots = Some(bytes),
            "actions" => form.actions = Some(bytes),
            other => return Err(ApiError::BadRequest(format!("unexpected multipart field {other:?}"))),
        }
    }
    Ok(form)
}

async fn upload(
    State(state): State<AppState>,
    multipart: Multipart,
) -> Result<impl IntoResponse, ApiError> {
    let form = read_form(multipart).await?;
    let user_id = required(form.user_id, "userId")?;
    let task_key = required(form.task_key, "taskKey")?;
    let language = required(form.language, "language")?;
    let survey = required(form.survey, "survey")?;
    let snapshots = required(form.snapshots, "snapshots")?;
    let actions = required(form.actions, "actions")?;

    if !state.storage().has_user(&user_id) {
        return Err(ApiError::UnknownUser(user_id));
    }
    let tasks = state.tasks();
    let task = find_task(&tasks, &task_key).ok_or_else(|| ApiError::UnknownTask(task_key.clone()))?;
    if !task.supports(&language) {
        return Err(ApiError::MalformedPayload(format!(
            "task {task_key:?} does not support language {language:?}"
        )));
    }

    let survey: SurveyInfo = serde_json::from_str(&survey)
        .map_err(|e| ApiError::MalformedPayload(format!("survey: {e}")))?;
    survey
        .validate()
        .map_err(|e| ApiError::MalformedPayload(e.to_string()))?;
    let session = SolutionSession {
        user_id: user_id.clone(),
        task_key: task_key.clone(),
        language: language.clone(),
        survey: survey.clone(),
        snapshots: decode_snapshots(&utf8(&snapshots, "snapshots")?)
            .map_err(|e| ApiError::MalformedPayload(format!("snapshots.csv: {e}")))?,
        actions: decode_actions(&utf8(&actions, "actions")?)
            .map_err(|e| ApiError::MalformedPayload(format!("actions.csv: {e}")))?,
        submitted_at_millis: now_millis(),
    };
    session
        .validate()
        .map_err(|e| ApiError::MalformedPayload(e.to_string()))?;

    let received_at_millis = session.submitted_at_millis;
    let submission_index = blocking(move || {
        Ok(state.storage().store(NewSubmission {
            user_id: &user_id,
            task_key: &task_key,
            language: &language,
            snapshots_csv: &snapshots,
            actions_csv: &actions,
            survey,
            received_at_millis,
        })?)
    })
    .await?;
    Ok((StatusCode::CREATED, Json(SubmissionReceipt { submission_index })))
}

async fn export(State(state): State<AppState>) -> Result<impl IntoResponse, ApiError> {
    let bytes = blocking(move || Ok(state.storage().export_zip()?)).await?;
    Ok((
        [
            (header::CONTENT_TYPE, "application/zip"),
            (header::CONTENT_DISPOSITION, "attachment; filename=\"export.zip\""),
        ],
        bytes,
    ))
}

async fn reload(State(state): State<AppState>) -> Result<impl IntoResponse, ApiError> {
    let tasks = blocking(move || {
        state.reload()?;
        Ok(state.tasks().len())
    })
    .await?;
    Ok(Json(json!({ "tasks": tasks })))
}
