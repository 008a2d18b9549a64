//! Checks against the published corpus. They run only when
//! `CODETRAIL_PAPER_DATASET` points at an export-layout directory, and they
//! report rather than gate: mismatches are printed, not failed.

use std::path::PathBuf;

use codetrail_analyzer::{participant_stats, score_final_snapshots, solution_counts, Dataset, LANGUAGE_ORDER};
use codetrail_postprocess::Runners;

use crate::support::*;

const PARTICIPANTS: usize = 148;
const MEAN_AGE: f64 = 19.0;
const AGE_RANGE: (i32, i32) = (11, 40);
const CORRECT: u64 = 326;
const INCORRECT: u64 = 148;

fn verdict(ok: bool, got: String, want: String) -> String {
    if ok {
        format!("match: {got}")
    } else {
        format!("MISMATCH: got {got}, published {want}")
    }
}

pub fn paper_dataset() -> Vec<(&'static str, String)> {
    let Some(root) = std::env::var_os("CODETRAIL_PAPER_DATASET").map(PathBuf::from) else {
        return vec![("published corpus", "skipped: CODETRAIL_PAPER_DATASET not set".into())];
    };
    let dataset = match Dataset::open(&root) {
        Ok(d) => d,
        Err(e) => return vec![("published corpus", format!("MISMATCH: cannot read {}: {e}", root.display()))],
    };
    let stats = participant_stats(&dataset);
    let mut out = vec![
        (
            "corpus participants",
            verdict(stats.participants == PARTICIPANTS, stats.participants.to_string(), PARTICIPANTS.to_string()),
        ),
        (
            "corpus age",
            verdict(
                stats.mean_age.map(f64::round) == Some(MEAN_AGE)
                    && (stats.min_age, stats.max_age) == (Some(AGE_RANGE.0), Some(AGE_RANGE.1)),
                format!("mean {:?}, range {:?}..{:?}", stats.mean_age, stats.min_age, stats.max_age),
                format!("mean {MEAN_AGE}, range {}..{}", AGE_RANGE.0, AGE_RANGE.1),
            ),
        ),
    ];
    let runners_path = std::env::var_os("CODETRAIL_RUNNERS")
        .map(PathBuf::from)
        .unwrap_or_else(|| config_dir().join("runners.json"));
    let counts = match Runners::load(&runners_path) {
        Ok(runners) => {
            let outcomes = score_final_snapshots(&dataset, &tasks(), &runners);
            let languages: Vec<String> = LANGUAGE_ORDER.iter().map(|l| l.to_string()).collect();
            let m = solution_counts(&outcomes, &[], &languages, 1.0);
            let got = format!(
                "S={} NS={} ({} unscored)",
                m.grand_total.correct, m.grand_total.incorrect, m.unscored
            );
            verdict(
                (m.grand_total.correct, m.grand_total.incorrect, m.unscored) == (CORRECT, INCORRECT, 0),
                got,
                format!("S={CORRECT} NS={INCORRECT}"),
            )
        }
        Err(e) => format!("MISMATCH: runners unavailable: {e:#}"),
    };
    out.push(("corpus solution counts", counts));
    out
}
