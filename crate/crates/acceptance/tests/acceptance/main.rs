//! One line per criterion: PASS/FAIL, wall time against its budget, and a
//! short detail. Exits non-zero when any criterion fails.

mod codec;
mod dataset;
mod offline;
mod privacy;
mod server;
mod support;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

type Check = fn() -> anyhow::Result<String>;

const CRITERIA: &[(&str, u64, Check)] = &[
    ("codec round-trip", 10, codec::round_trip),
    ("merge oracle equivalence", 30, offline::merge_equivalence),
    ("filter properties", 10, offline::filter_properties),
    ("scoring ground truth", 60, offline::scoring_ground_truth),
    ("anonymizer", 5, offline::anonymizer),
    ("end-to-end session", 120, e2e::typist_session),
    ("privacy", 10, privacy::payload_scan),
    ("server properties", 120, server::registrations_and_uploads),
];

fn run(check: Check) -> (Result<String, String>, Duration) {
    let start = Instant::now();
    let result = match panic::catch_unwind(AssertUnwindSafe(check)) {
        Ok(Ok(detail)) => Ok(detail),
        Ok(Err(e)) => Err(format!("{e:#}")),
        Err(p) => Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into())),
    };
    (result, start.elapsed())
}

fn main() -> ExitCode {
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for &(name, budget, check) in CRITERIA {
        let (result, elapsed) = run(check);
        let budget = Duration::from_secs(budget);
        let verdict = match &result {
            Ok(_) if elapsed <= budget => "PASS",
            _ => "FAIL",
        };
        let detail = match result {
            Ok(d) if elapsed <= budget => d,
            Ok(d) => format!("{d}; over budget"),
            Err(e) => e,
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!(
            "{verdict} {name:<26} {:>7.2}s / {:>3}s  {detail}",
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    for (name, outcome) in dataset::paper_dataset() {
        println!("{:<4} {name:<26} {outcome}", if outcome.starts_with("skipped") { "SKIP" } else { "INFO" });
    }
    if failed == 0 {
        println!("acceptance: all {} criteria passed", CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria failed", CRITERIA.len());
        ExitCode::FAILURE
    }
}
