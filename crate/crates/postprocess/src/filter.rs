//! Removal of intermediate snapshots under a finality criterion.

use std::fmt;
use std::str::FromStr;

use codetrail_core::{line_count, SnapshotRecord};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum FinalityCriterion {
    /// Keep every snapshot.
    All,
    /// Keep a snapshot when the next one has a different line count, and
    /// always keep the last one.
    LineCompleted,
    /// Drop snapshots repeating the previously kept fragment.
    DedupeOnly,
}

impl FinalityCriterion {
    pub fn as_str(self) -> &'static str {
        match self {
            FinalityCriterion::All => "all",
            FinalityCriterion::LineCompleted => "lineCompleted",
            FinalityCriterion::DedupeOnly => "dedupeOnly",
        }
    }
}

impl fmt::Display for FinalityCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FinalityCriterion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(FinalityCriterion::All),
            "lineCompleted" => Ok(FinalityCriterion::LineCompleted),
            "dedupeOnly" => Ok(FinalityCriterion::DedupeOnly),
            other => Err(format!(
                "unknown criterion {other:?} (expected all, lineCompleted or dedupeOnly)"
            )),
        }
    }
}

/// Indices of the snapshots kept under `criterion`, ascending.
pub fn kept_indices(snapshots: &[SnapshotRecord], criterion: FinalityCriterion) -> Vec<usize> {
    match criterion {
        FinalityCriterion::All => (0..snapshots.len()).collect(),
        FinalityCriterion::DedupeOnly => {
            let mut kept: Vec<usize> = Vec::new();
            for (i, s) in snapshots.iter().enumerate() {
                match kept.last() {
                    Some(&k) if snapshots[k].fragment == s.fragment => {}
                    _ => kept.push(i),
                }
            }
            kept
        }
        FinalityCriterion::LineCompleted => {
            let counts: Vec<usize> = snapshots.iter().map(|s| line_count(&s.fragment)).collect();
            (0..counts.len())
                .filter(|&i| i + 1 == counts.len() || counts[i] != counts[i + 1])
                .collect()
        }
    }
}

pub fn filter_intermediate(
    snapshots: &[SnapshotRecord],
    criterion: FinalityCriterion,
) -> Vec<SnapshotRecord> {
    kept_indices(snapshots, criterion)
        .into_iter()
        .map(|i| snapshots[i].clone())
        .collect()
}
