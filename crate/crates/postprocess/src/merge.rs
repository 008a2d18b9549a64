//! Combines the snapshot and action streams of a session into one
//! chronological sequence.

use codetrail_core::{ActionRecord, SnapshotRecord};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    Snapshot,
    Action,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MergedRow {
    pub kind: RowKind,
    pub timestamp_millis: i64,
    /// For a snapshot row its own index; for an action row the index of the
    /// latest snapshot taken at or before it, or -1.
    pub snapshot_index: i64,
    /// Index into the source list selected by `kind`.
    pub payload_ref: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MergeError {
    #[error("{stream} stream is not sorted at index {index}")]
    UnsortedInput { stream: &'static str, index: usize },
}

fn check_sorted(stream: &'static str, ts: impl Iterator<Item = i64>) -> Result<(), MergeError> {
    let mut prev = i64::MIN;
    for (index, t) in ts.enumerate() {
        if t < prev {
            return Err(MergeError::UnsortedInput { stream, index });
        }
        prev = t;
    }
    Ok(())
}

/// Two-way merge by timestamp. Snapshots precede actions carrying the same
/// timestamp, so an action is attributed to the snapshot taken in the same
/// millisecond.
pub fn merge_streams(
    snapshots: &[SnapshotRecord],
    actions: &[ActionRecord],
) -> Result<Vec<MergedRow>, MergeError> {
    check_sorted("snapshots", snapshots.iter().map(|s| s.timestamp_millis))?;
    check_sorted("actions", actions.iter().map(|a| a.timestamp_millis))?;

    let mut rows = Vec::with_capacity(snapshots.len() + actions.len());
    let (mut si, mut ai) = (0, 0);
    while si < snapshots.len() || ai < actions.len() {
        let take_snapshot = match (snapshots.get(si), actions.get(ai)) {
            (Some(s), Some(a)) => s.timestamp_millis <= a.timestamp_millis,
            (Some(_), None) => true,
            _ => false,
        };
        if take_snapshot {
            rows.push(MergedRow {
                kind: RowKind::Snapshot,
                timestamp_millis: snapshots[si].timestamp_millis,
                snapshot_index: si as i64,
                payload_ref: si,
            });
            si += 1;
        } else {
            rows.push(MergedRow {
                kind: RowKind::Action,
                timestamp_millis: actions[ai].timestamp_millis,
                snapshot_index: si as i64 - 1,
                payload_ref: ai,
            });
            ai += 1;
        }
    }
    Ok(rows)
}
