use std::time::Duration;

use codetrail_core::{SubmissionReceipt, SurveyInfo, TaskSpec};
use serde::Deserialize;

use crate::error::TrackerError;

/// One submission as sent over the wire.
pub struct UploadPayload {
    pub content_type: String,
    pub body: Vec<u8>,
}

/// Encodes the multipart form by hand so the exact bytes leaving the machine
/// are available for inspection.
pub fn build_upload(
    user_id: &str,
    task_key: &str,
    language: &str,
    survey: &SurveyInfo,
    snapshots_csv: &[u8],
    actions_csv: &[u8],
) -> UploadPayload {
    let boundary = format!("codetrail-{}", uuid::Uuid::new_v4().simple());
    let survey_json = serde_json::to_vec(survey).expect("survey serializes");
    let mut body = Vec::new();
    let mut part = |name: &str, file_name: Option<&str>, content_type: &str, data: &[u8]| {
        body.extend_from_slice(format!("--{boundary}\r\n").as_bytes());
        let disposition = match file_name {
            Some(f) => format!("Content-Disposition: form-data; name=\"{name}\"; filename=\"{f}\"\r\n"),
            None => format!("Content-Disposition: form-data; name=\"{name}\"\r\n"),
        };
        body.extend_from_slice(disposition.as_bytes());
        body.extend_from_slice(format!("Content-Type: {content_type}\r\n\r\n").as_bytes());
        body.extend_from_slice(data);
        body.extend_from_slice(b"\r\n");
    };
    part("userId", None, "text/plain", user_id.as_bytes());
    part("taskKey", None, "text/plain", task_key.as_bytes());
    part("language", None, "text/plain", language.as_bytes());
    part("survey", None, "application/json", &survey_json);
    part("snapshots", Some("snapshots.csv"), "text/csv", snapshots_csv);
    part("actions", Some("actions.csv"), "text/csv", actions_csv);
    body.extend_from_slice(format!("--{boundary}--\r\n").as_bytes());
    UploadPayload {
        content_type: format!("multipart/form-data; boundary={boundary}"),
        body,
    }
}

#[derive(Clone)]
pub struct ServerClient {
    base: String,
    http: reqwest::Client,
}

#[derive(Deserialize)]
struct NewUser {
    id: String,
}

fn unreachable(e: reqwest::Error) -> TrackerError {
    TrackerError::ServerUnreachable(e.to_string())
}

async fn check(resp: reqwest::Response) -> Result<reqwest::Response, TrackerError> {
    let status = resp.status();
    if status.is_success() {
        return Ok(resp);
    }
    let text = resp.text().await.unwrap_or_default();
    let message = serde_json::from_str::<serde_json::Value>(&text)
        .ok()
        .and_then(|v| v["message"].as_str().map(String::from))
        .unwrap_or(text);
    Err(TrackerError::ServerRejected {
        status: status.as_u16(),
        message,
    })
}

impl ServerClient {
    pub fn new(base: &str) -> Self {
        let http = reqwest::Client::builder()
            .connect_timeout(Duration::from_secs(5))
            .timeout(Duration::from_secs(60))
            .build()
            .expect("http client");
        ServerClient {
            base: base.trim_end_matches('/').to_string(),
            http,
        }
    }

    pub async fn tasks(&self) -> Result<Vec<TaskSpec>, TrackerError> {
        let resp = self
            .http
            .get(format!("{}/api/tasks", self.base))
            .send()
            .await
            .map_err(unreachable)?;
        check(resp).await?.json().await.map_err(unreachable)
    }

    pub async fn register_user(&self) -> Result<String, TrackerError> {
        let resp = self
            .http
            .post(format!("{}/api/users", self.base))
            .send()
            .await
            .map_err(unreachable)?;
        let user: NewUser = check(resp).await?.json().await.map_err(unreachable)?;
        Ok(user.id)
    }

    pub async fn upload(&self, payload: UploadPayload) -> Result<SubmissionReceipt, TrackerError> {
        let resp = self
            .http
            .post(format!("{}/api/data", self.base))
            .header(reqwest::header::CONTENT_TYPE, payload.content_type)
            .body(payload.body)
            .send()
            .await
            .map_err(unreachable)?;
        check(resp).await?.json().await.map_err(unreachable)
    }
}
