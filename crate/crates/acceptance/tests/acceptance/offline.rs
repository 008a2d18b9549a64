use std::cell::Cell;
use std::io::Write;
use std::process::{Command, Stdio};

use anyhow::{anyhow, ensure, Context, Result};
use codetrail_core::tasks::find_task;
use codetrail_core::{line_count, normalize_output, ActionRecord, EventType, Score, SnapshotRecord, TaskSpec, TestCase};
use codetrail_postprocess::anonymize::{profile_for, tokenize, TokenKind};
use codetrail_postprocess::{
    anonymize_code, filter_intermediate, kept_indices, merge_streams, score_solution,
    FinalityCriterion, MergedRow, RowKind,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use crate::support::*;

fn runner_with(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn snap(t: i64, fragment: String) -> SnapshotRecord {
    SnapshotRecord {
        timestamp_millis: t,
        task_key: "t".into(),
        language: "python".into(),
        file_name: "t.py".into(),
        fragment,
    }
}

fn act(t: i64) -> ActionRecord {
    ActionRecord {
        timestamp_millis: t,
        event_type: EventType::Action,
        action_id: "EditorPaste".into(),
        detail: String::new(),
    }
}

/// Concatenate, stable-sort by timestamp, then attach each action to the
/// last snapshot at or before it.
fn merge_oracle(snapshots: &[SnapshotRecord], actions: &[ActionRecord]) -> Vec<MergedRow> {
    let mut rows: Vec<(RowKind, i64, usize)> = snapshots
        .iter()
        .enumerate()
        .map(|(i, s)| (RowKind::Snapshot, s.timestamp_millis, i))
        .chain(actions.iter().enumerate().map(|(i, a)| (RowKind::Action, a.timestamp_millis, i)))
        .collect();
    rows.sort_by_key(|r| r.1);
    rows.into_iter()
        .map(|(kind, t, i)| MergedRow {
            kind,
            timestamp_millis: t,
            snapshot_index: match kind {
                RowKind::Snapshot => i as i64,
                RowKind::Action => snapshots.iter().filter(|s| s.timestamp_millis <= t).count() as i64 - 1,
            },
            payload_ref: i,
        })
        .collect()
}

fn sorted_sequences(values: &[i64], max_len: usize) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    let mut frontier: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for seq in &frontier {
            for &v in values {
                if seq.last().is_none_or(|&l| l <= v) {
                    let mut s = seq.clone();
                    s.push(v);
                    next.push(s);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

pub fn merge_equivalence() -> Result<String> {
    let seqs = sorted_sequences(&[10, 20, 30, 40], 5);
    let mut pairs = 0;
    for s in &seqs {
        let snapshots: Vec<_> = s.iter().map(|&t| snap(t, String::new())).collect();
        for a in &seqs {
            let actions: Vec<_> = a.iter().map(|&t| act(t)).collect();
            ensure!(
                merge_streams(&snapshots, &actions)? == merge_oracle(&snapshots, &actions),
                "mismatch for snapshots {s:?}, actions {a:?}"
            );
            pairs += 1;
        }
    }
    let strategy = (
        prop::collection::vec(0i64..300, 0..60),
        prop::collection::vec(0i64..300, 0..60),
    );
    let result = runner_with(500).run(&strategy, |(mut s, mut a)| {
        s.sort();
        a.sort();
        let snapshots: Vec<_> = s.iter().map(|&t| snap(t, String::new())).collect();
        let actions: Vec<_> = a.iter().map(|&t| act(t)).collect();
        prop_assert_eq!(merge_streams(&snapshots, &actions).unwrap(), merge_oracle(&snapshots, &actions));
        Ok(())
    });
    ensure!(result.is_ok(), "{}", result.unwrap_err());
    Ok(format!("{pairs} exhaustive pairs + 500 random"))
}

/// Keep index i when the next snapshot has a different line count, and keep
/// the last one.
fn keep_rule_oracle(counts: &[usize]) -> Vec<usize> {
    (0..counts.len())
        .filter(|&i| i + 1 == counts.len() || counts[i + 1] != counts[i])
        .collect()
}

fn is_subsequence(sub: &[SnapshotRecord], full: &[SnapshotRecord]) -> bool {
    let mut it = full.iter();
    sub.iter().all(|s| it.any(|f| f == s))
}

pub fn filter_properties() -> Result<String> {
    let kept_total = Cell::new(0);
    let strategy = prop::collection::vec("[ab\n]{0,8}", 1..40);
    let result = runner_with(500).run(&strategy, |fragments| {
        let snaps: Vec<_> = fragments.into_iter().enumerate().map(|(i, f)| snap(i as i64, f)).collect();
        prop_assert_eq!(filter_intermediate(&snaps, FinalityCriterion::All), snaps.clone());
        let kept = filter_intermediate(&snaps, FinalityCriterion::LineCompleted);
        prop_assert!(is_subsequence(&kept, &snaps));
        prop_assert_eq!(kept.last(), snaps.last());
        let counts: Vec<usize> = snaps.iter().map(|s| line_count(&s.fragment)).collect();
        prop_assert_eq!(kept_indices(&snaps, FinalityCriterion::LineCompleted), keep_rule_oracle(&counts));
        kept_total.set(kept_total.get() + kept.len());
        Ok(())
    });
    ensure!(result.is_ok(), "{}", result.unwrap_err());
    Ok(format!("500 sequences, {} snapshots kept", kept_total.get()))
}

/// Wraps the innermost part in brackets level by level; strings of length
/// up to two are left alone.
fn brackets_oracle(s: &str) -> String {
    let chars: Vec<char> = s.chars().collect();
    if chars.len() <= 2 {
        return s.to_string();
    }
    let inner: String = chars[1..chars.len() - 1].iter().collect();
    format!("{}({}){}", chars[0], brackets_oracle(&inner), chars[chars.len() - 1])
}

fn all_strings(alphabet: &[char], max_len: usize) -> Vec<String> {
    let mut out = Vec::new();
    let mut level = vec![String::new()];
    for _ in 0..max_len {
        level = level
            .iter()
            .flat_map(|p| alphabet.iter().map(move |c| format!("{p}{c}")))
            .collect();
        out.extend(level.iter().cloned());
    }
    out
}

/// Runs the bundled brackets reference once per input inside a single
/// interpreter.
fn reference_brackets_outputs(inputs: &[String]) -> Result<Vec<String>> {
    const DRIVER: &str = r#"
import io, sys
code = compile(open(sys.argv[1]).read(), "brackets.py", "exec")
lines = sys.stdin.read().split("\n")[:-1]
out = sys.stdout
for line in lines:
    sys.stdin = io.StringIO(line + "\n")
    buf = io.StringIO()
    sys.stdout = buf
    exec(code, {"__name__": "__main__"})
    sys.stdout = out
    out.write(buf.getvalue().rstrip("\n").replace("\n", "\\n") + "\n")
"#;
    let dir = tempfile::tempdir()?;
    let driver = dir.path().join("driver.py");
    std::fs::write(&driver, DRIVER)?;
    let mut child = Command::new("python3")
        .arg(&driver)
        .arg(config_dir().join("reference/brackets.py"))
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .context("starting python3")?;
    let mut stdin = child.stdin.take().unwrap();
    let payload: String = inputs.iter().map(|s| format!("{s}\n")).collect();
    let writer = std::thread::spawn(move || stdin.write_all(payload.as_bytes()));
    let output = child.wait_with_output()?;
    writer.join().unwrap()?;
    ensure!(output.status.success(), "driver exited with {}", output.status);
    Ok(String::from_utf8(output.stdout)?.lines().map(String::from).collect())
}

pub fn scoring_ground_truth() -> Result<String> {
    // The oracle first: pinned examples and the bundled tests.
    ensure!(brackets_oracle("example") == "e(x(a(m)p)l)e");
    ensure!(brackets_oracle("card") == "c(ar)d");
    let tasks = tasks();
    let brackets = find_task(&tasks, "brackets").ok_or_else(|| anyhow!("no brackets task"))?;
    for t in &brackets.tests {
        let expected = brackets_oracle(t.input.trim_end_matches('\n'));
        ensure!(
            normalize_output(&t.expected_output) == expected,
            "bundled test {:?} expects {:?}, oracle says {expected:?}",
            t.input,
            t.expected_output
        );
    }
    let inputs = all_strings(&['a', 'b', 'c'], 8);
    let outputs = reference_brackets_outputs(&inputs)?;
    ensure!(outputs.len() == inputs.len(), "driver returned {} outputs", outputs.len());
    for (input, got) in inputs.iter().zip(&outputs) {
        ensure!(*got == brackets_oracle(input), "reference on {input:?} printed {got:?}");
        ensure!(!got.contains("()"), "empty brackets for {input:?}");
    }

    let runners = runners();
    let python = runners.get("python")?;
    let mut test_runs = 0;
    for task in &tasks {
        let score = score_solution(task, &reference(&task.key), python)?;
        ensure!(score.value() == 1.0, "{} reference scored {score}", task.key);
        let empty = score_solution(task, "", python)?;
        ensure!(empty.value() == 0.0, "{} empty source scored {empty}", task.key);
        test_runs += 2 * task.tests.len();
    }
    let constant = TaskSpec {
        key: "constant".into(),
        names: Default::default(),
        descriptions: Default::default(),
        examples: vec![],
        tests: ["7", "3", "7", "1", "2", "70"].iter().map(|o| TestCase::new("", format!("{o}\n"))).collect(),
        supported_languages: vec!["python".into()],
    };
    let score = score_solution(&constant, "print(7)\n", python)?;
    ensure!(score == Score::new(2, 6)?, "constant solution scored {score}");
    Ok(format!(
        "brackets oracle on {} strings, {} reference/empty test runs, constant 2/6",
        inputs.len(),
        test_runs + 6
    ))
}

fn non_identifier_tokens(code: &str) -> Vec<(TokenKind, String)> {
    let profile = profile_for("python").unwrap();
    tokenize(code, profile)
        .into_iter()
        .filter(|t| {
            t.kind != TokenKind::Identifier || profile.keywords.contains(t.text) || profile.builtins.contains(t.text)
        })
        .map(|t| (t.kind, t.text.to_string()))
        .collect()
}

pub fn anonymizer() -> Result<String> {
    let corpus: serde_json::Value =
        serde_json::from_str(include_str!("../../../postprocess/tests/data/anonymize_corpus.json"))?;
    let corpus = corpus.as_array().ok_or_else(|| anyhow!("corpus is not a list"))?;
    ensure!(corpus.len() == 20, "corpus has {} snippets", corpus.len());
    for (i, case) in corpus.iter().enumerate() {
        let code = case["code"].as_str().unwrap_or_default();
        let (once, _) = anonymize_code(code, "python")?;
        ensure!(once == case["expected"].as_str().unwrap_or_default(), "snippet {i} differs from the hand-lexed output");
        let (twice, _) = anonymize_code(&once, "python")?;
        ensure!(twice == once, "snippet {i} is not idempotent");
        ensure!(non_identifier_tokens(code) == non_identifier_tokens(&once), "snippet {i} changed a non-identifier token");
    }

    let identifier = prop_oneof![
        "[a-z_][a-z0-9_]{0,5}",
        Just("print".to_string()),
        Just("if".to_string()),
        Just("v0".to_string()),
        Just("v7".to_string()),
    ];
    let sep = prop_oneof![Just(" "), Just(" = "), Just("("), Just(")\n"), Just("."), Just(", ")];
    let soup = prop::collection::vec((identifier, sep), 0..40)
        .prop_map(|parts| parts.into_iter().map(|(a, b)| format!("{a}{b}")).collect::<String>());
    let result = runner_with(200).run(&soup, |code| {
        let (out, map) = anonymize_code(&code, "python").unwrap();
        let mut targets: Vec<&String> = map.values().collect();
        targets.sort();
        targets.dedup();
        prop_assert_eq!(targets.len(), map.len());
        prop_assert_eq!(non_identifier_tokens(&code), non_identifier_tokens(&out));
        Ok(())
    });
    ensure!(result.is_ok(), "{}", result.unwrap_err());
    Ok("20 corpus snippets, 200 identifier soups".into())
}
