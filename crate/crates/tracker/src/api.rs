//! Loopback HTTP API used by the task panel and by editor integrations.

use std::path::{Component, Path, PathBuf};

use axum::extract::{Path as UrlPath, State};
use axum::http::{header, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use codetrail_core::runner::RunResult;
use codetrail_core::{ActionRecord, EventType, SubmissionReceipt, SurveyInfo, TaskSpec};
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::net::TcpListener;

use crate::daemon::{SessionState, Tracker};
use crate::error::TrackerError;

const FALLBACK_PAGE: &str = include_str!("../static/index.html");

impl IntoResponse for TrackerError {
    fn into_response(self) -> Response {
        let status = match &self {
            TrackerError::InvalidSurvey(_)
            | TrackerError::UnsupportedLanguage { .. }
            | TrackerError::InvalidEvent(_)
            | TrackerError::RunnerMissing(_) => StatusCode::UNPROCESSABLE_ENTITY,
            TrackerError::UnknownTask(_) => StatusCode::NOT_FOUND,
            TrackerError::InvalidPhase { .. } | TrackerError::NothingToSubmit => StatusCode::CONFLICT,
            TrackerError::ServerUnreachable(_) => StatusCode::SERVICE_UNAVAILABLE,
            TrackerError::ServerRejected { .. } => StatusCode::BAD_GATEWAY,
            TrackerError::Run(_) | TrackerError::Io(_) | TrackerError::Corrupt(_) => {
                StatusCode::INTERNAL_SERVER_ERROR
            }
        };
        (status, Json(json!({ "error": self.kind(), "message": self.to_string() }))).into_response()
    }
}

pub fn router(tracker: Tracker, panel_dir: Option<PathBuf>) -> Router {
    Router::new()
        .route("/state", get(state))
        .route("/tasks", get(tasks))
        .route("/survey", post(survey))
        .route("/task/select", post(select))
        .route("/event", post(event))
        .route("/run", post(run))
        .route("/submit", post(submit))
        .route("/", get(index))
        .route("/{*path}", get(asset))
        .with_state(AppState { tracker, panel_dir })
}

pub async fn serve(listener: TcpListener, tracker: Tracker, panel_dir: Option<PathBuf>) -> std::io::Result<()> {
    axum::serve(listener, router(tracker, panel_dir)).await
}

#[derive(Clone)]
struct AppState {
    tracker: Tracker,
    panel_dir: Option<PathBuf>,
}

async fn state(State(app): State<AppState>) -> Json<SessionState> {
    Json(app.tracker.state())
}

async fn tasks(State(app): State<AppState>) -> Json<Vec<TaskSpec>> {
    Json(app.tracker.tasks())
}

// Parsed by hand so out-of-range values surface as InvalidSurvey.
async fn survey(State(app): State<AppState>, Json(body): Json<Value>) -> Result<Json<SessionState>, TrackerError> {
    let survey: SurveyInfo =
        serde_json::from_value(body).map_err(|e| TrackerError::InvalidSurvey(e.to_string()))?;
    Ok(Json(app.tracker.submit_survey(survey)?))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct SelectBody {
    task_key: String,
    language: String,
}

async fn select(State(app): State<AppState>, Json(body): Json<SelectBody>) -> Result<Json<SessionState>, TrackerError> {
    let tracker = app.tracker.clone();
    let state = tokio::task::spawn_blocking(move || tracker.select_task(&body.task_key, &body.language))
        .await
        .expect("select task")?;
    Ok(Json(state))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct EventBody {
    event_type: String,
    action_id: String,
    #[serde(default)]
    detail: String,
}

async fn event(State(app): State<AppState>, Json(body): Json<EventBody>) -> Result<Json<ActionRecord>, TrackerError> {
    let event_type: EventType = body
        .event_type
        .parse()
        .map_err(|e: codetrail_core::ModelError| TrackerError::InvalidEvent(e.to_string()))?;
    Ok(Json(app.tracker.ingest_event(event_type, &body.action_id, &body.detail)?))
}

#[derive(Deserialize, Default)]
struct RunBody {
    stdin: Option<String>,
}

async fn run(State(app): State<AppState>, body: Option<Json<RunBody>>) -> Result<Json<RunResult>, TrackerError> {
    let stdin = body.map(|Json(b)| b).unwrap_or_default().stdin;
    let tracker = app.tracker.clone();
    let result = tokio::task::spawn_blocking(move || tracker.run_solution(stdin.as_deref()))
        .await
        .expect("run task")?;
    Ok(Json(result))
}

async fn submit(State(app): State<AppState>) -> Result<Json<SubmissionReceipt>, TrackerError> {
    Ok(Json(app.tracker.submit().await?))
}

async fn index(State(app): State<AppState>) -> Response {
    match &app.panel_dir {
        Some(dir) => serve_file(dir, "index.html").await,
        None => Html(FALLBACK_PAGE).into_response(),
    }
}

async fn asset(State(app): State<AppState>, UrlPath(path): UrlPath<String>) -> Response {
    match &app.panel_dir {
        Some(dir) => serve_file(dir, &path).await,
        None => StatusCode::NOT_FOUND.into_response(),
    }
}

fn content_type(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()) {
        Some("html") => "text/html; charset=utf-8",
        Some("js" | "mjs") => "text/javascript",
        Some("css") => "text/css",
        Some("json") => "application/json",
        Some("svg") => "image/svg+xml",
        Some("png") => "image/png",
        Some("ico") => "image/x-icon",
        Some("woff2") => "font/woff2",
        _ => "application/octet-stream",
    }
}

async fn serve_file(root: &Path, relative: &str) -> Response {
    let relative = Path::new(relative);
    if !relative.components().all(|c| matches!(c, Component::Normal(_))) {
        return StatusCode::NOT_FOUND.into_response();
    }
    let path = root.join(relative);
    match tokio::fs::read(&path).await {
        Ok(bytes) => ([(header::CONTENT_TYPE, content_type(&path))], bytes).into_response(),
        Err(_) => StatusCode::NOT_FOUND.into_response(),
    }
}
