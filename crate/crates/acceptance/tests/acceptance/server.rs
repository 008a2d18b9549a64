use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use anyhow::{anyhow, ensure, Result};
use codetrail_core::session::SubmissionMeta;
use codetrail_core::{encode_actions, encode_snapshots, ActionRecord, EventType, SnapshotRecord};
use codetrail_tracker::{build_upload, ServerClient};

use crate::support::*;

const REGISTRATIONS: usize = 10_000;
const CLIENTS: usize = 16;
const PER_CLIENT: usize = 10;
const TASKS: [&str; 6] = ["pies", "max_3", "is_zero", "voting", "max_digit", "brackets"];

fn csvs(task: &str, client: usize, n: usize) -> (String, String) {
    let t0 = 1_700_000_000_000 + (client * 1000 + n) as i64 * 60_000;
    let snaps: Vec<SnapshotRecord> = (0..3)
        .map(|k| SnapshotRecord {
            timestamp_millis: t0 + k * 1000,
            task_key: task.into(),
            language: "python".into(),
            file_name: format!("{task}.py"),
            fragment: format!("# client {client} submission {n}\n{}", "x = 1\n".repeat(k as usize)),
        })
        .collect();
    let acts = vec![ActionRecord {
        timestamp_millis: t0 + 1500,
        event_type: EventType::Run,
        action_id: "Run".into(),
        detail: "exit=0".into(),
    }];
    (encode_snapshots(&snaps), encode_actions(&acts))
}

fn is_uuid_v4(id: &str) -> bool {
    uuid::Uuid::parse_str(id).is_ok_and(|u| u.get_version_num() == 4 && u.hyphenated().to_string() == id)
}

pub fn registrations_and_uploads() -> Result<String> {
    runtime().block_on(async {
        let server = start_server().await;
        let client = ServerClient::new(&server.url);

        let mut ids = BTreeSet::new();
        let mut pending = tokio::task::JoinSet::new();
        for _ in 0..32 {
            let client = client.clone();
            pending.spawn(async move {
                let mut got = Vec::new();
                for _ in 0..REGISTRATIONS / 32 + 1 {
                    got.push(client.register_user().await);
                }
                got
            });
        }
        let mut issued = 0;
        while let Some(batch) = pending.join_next().await {
            for id in batch? {
                let id = id?;
                ensure!(is_uuid_v4(&id), "{id} is not a UUID v4");
                ids.insert(id);
                issued += 1;
            }
        }
        ensure!(issued >= REGISTRATIONS);
        ensure!(ids.len() == issued, "{} duplicate ids", issued - ids.len());

        let mut uploads = tokio::task::JoinSet::new();
        for c in 0..CLIENTS {
            let client = client.clone();
            uploads.spawn(async move {
                let user = client.register_user().await?;
                let mut receipts = Vec::new();
                for n in 0..PER_CLIENT {
                    let task = TASKS[(c + n) % TASKS.len()];
                    let (snaps, acts) = csvs(task, c, n);
                    let payload = build_upload(&user, task, "python", &survey(), snaps.as_bytes(), acts.as_bytes());
                    receipts.push((task, client.upload(payload).await?.submission_index));
                }
                anyhow::Ok((user, receipts))
            });
        }
        let mut expected: BTreeMap<(String, String), Vec<u64>> = BTreeMap::new();
        while let Some(result) = uploads.join_next().await {
            let (user, receipts) = result??;
            for (task, index) in receipts {
                expected.entry((user.clone(), task.to_string())).or_default().push(index);
            }
        }
        for ((user, task), indices) in &expected {
            let want: Vec<u64> = (0..indices.len() as u64).collect();
            ensure!(*indices == want, "{user}/{task} got indices {indices:?}");
        }

        let export = reqwest::get(format!("{}/api/export", server.url)).await?.bytes().await?;
        let mut zip = zip::ZipArchive::new(std::io::Cursor::new(export.to_vec()))?;
        let mut folders = BTreeSet::new();
        for i in 0..zip.len() {
            let mut entry = zip.by_index(i)?;
            let name = entry.name().to_string();
            let parts: Vec<&str> = name.split('/').collect();
            ensure!(parts.len() == 4, "unexpected entry {name}");
            folders.insert((parts[0].to_string(), parts[1].to_string(), parts[2].to_string()));
            if parts[3] == "meta.json" {
                let mut text = String::new();
                entry.read_to_string(&mut text)?;
                let meta: SubmissionMeta = serde_json::from_str(&text)?;
                ensure!(
                    (meta.user_id.as_str(), meta.task_key.as_str(), meta.submission_index.to_string())
                        == (parts[0], parts[1], parts[2].to_string()),
                    "{name} names another submission"
                );
            }
        }
        let total = CLIENTS * PER_CLIENT;
        ensure!(folders.len() == total, "{} submissions exported", folders.len());
        ensure!(zip.len() == total * 3, "{} export entries", zip.len());
        let on_disk = walk_submissions(&server.storage)?;
        ensure!(on_disk == total, "{on_disk} submissions stored");
        Ok(format!("{issued} distinct v4 ids, {total} stored submissions, export with {} entries", zip.len()))
    })
}

fn walk_submissions(root: &std::path::Path) -> Result<usize> {
    let mut count = 0;
    for user in std::fs::read_dir(root)? {
        let user = user?;
        if !user.file_type()?.is_dir() || user.file_name().to_string_lossy().starts_with('.') {
            continue;
        }
        for task in std::fs::read_dir(user.path())? {
            count += std::fs::read_dir(task?.path())?.count();
        }
    }
    if count == 0 {
        return Err(anyhow!("nothing stored"));
    }
    Ok(count)
}
