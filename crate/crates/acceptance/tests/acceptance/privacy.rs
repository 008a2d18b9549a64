use std::sync::{Arc, Mutex};

use anyhow::{anyhow, ensure, Result};
use axum::body::Bytes;
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::Json;
use codetrail_core::{decode_snapshots, EventType};
use codetrail_tracker::Tracker;
use serde_json::json;

use crate::support::*;

const ACCOUNT: &str = "qa_account_5310";
const SECRET: &str = "NEIGHBOUR-SECRET-9027";

async fn recording_server() -> (String, Arc<Mutex<Vec<Vec<u8>>>>) {
    let bodies = Arc::new(Mutex::new(Vec::new()));
    let sink = bodies.clone();
    let tasks: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(config_dir().join("tasks.json")).unwrap()).unwrap();
    let app = axum::Router::new()
        .route("/api/tasks", get(move || async move { Json(tasks) }))
        .route(
            "/api/users",
            post(|| async { (StatusCode::CREATED, Json(json!({"id": uuid::Uuid::new_v4().to_string()}))) }),
        )
        .route(
            "/api/data",
            post(move |body: Bytes| {
                let sink = sink.clone();
                async move {
                    sink.lock().unwrap().push(body.to_vec());
                    (StatusCode::CREATED, Json(json!({"submissionIndex": 0})))
                }
            }),
        );
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    tokio::spawn(async move { axum::serve(listener, app).await });
    (url, bodies)
}

fn contains(haystack: &[u8], needle: &str) -> bool {
    haystack.windows(needle.len()).any(|w| w == needle.as_bytes())
}

pub fn payload_scan() -> Result<String> {
    runtime().block_on(async {
        let (url, bodies) = recording_server().await;
        let root = tempfile::tempdir()?;
        let home = root.path().join("home").join(ACCOUNT);
        let tracker = Tracker::start(tracker_config(&home.join(".codetrail"), &url)).await?;
        tracker.submit_survey(survey())?;
        let draft = tracker
            .select_task("max_3", "python")?
            .active_task
            .ok_or_else(|| anyhow!("no active task"))?
            .draft_file_path;
        std::fs::write(draft.with_file_name("scratch.txt"), SECRET)?;
        std::fs::write(home.join("notes.txt"), SECRET)?;

        let code = reference("max_3");
        let mut written = vec![String::new()];
        for end in (5..code.len()).step_by(5).chain([code.len()]) {
            atomic_write(&draft, &code[..end]);
            written.push(code[..end].to_string());
            settle().await;
        }
        tracker.ingest_event(EventType::Action, "EditorPaste", "len=5")?;
        tracker.run_solution(Some("1\n2\n3\n"))?;
        tracker.submit().await?;

        let bodies = bodies.lock().unwrap();
        ensure!(bodies.len() == 1, "{} uploads recorded", bodies.len());
        let payload = &bodies[0];
        for (what, needle) in [
            ("home path", home.display().to_string()),
            ("temp root", root.path().display().to_string()),
            ("account name", ACCOUNT.to_string()),
            ("neighbouring file", SECRET.to_string()),
        ] {
            ensure!(!contains(payload, &needle), "{what} found in the upload");
        }
        if let Ok(user) = std::env::var("USER") {
            if user.len() >= 4 {
                ensure!(!contains(payload, &user), "login name found in the upload");
            }
        }
        let text = String::from_utf8_lossy(payload);
        let start = text.find("date,timestampMillis,taskKey").ok_or_else(|| anyhow!("no snapshots part"))?;
        let end = start + text[start..].find("\r\n--").ok_or_else(|| anyhow!("unterminated part"))?;
        let snaps = decode_snapshots(&text[start..end])?;
        for s in &snaps {
            ensure!(written.contains(&s.fragment), "fragment not from the draft: {:?}", s.fragment);
            ensure!(s.file_name == "max_3.py", "file name {:?}", s.file_name);
        }
        Ok(format!("{} byte payload, {} fragments checked", payload.len(), snaps.len()))
    })
}
