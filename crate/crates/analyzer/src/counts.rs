use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;
use std::ops::AddAssign;

use codetrail_core::tasks::find_task;
use codetrail_core::{Score, TaskSpec};
use codetrail_postprocess::{score_solution, Runners};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;

pub const DEFAULT_THRESHOLD: f64 = 1.0;

/// Column order used when languages are not given explicitly.
pub const LANGUAGE_ORDER: [&str; 4] = ["python", "java", "kotlin", "cpp"];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub correct: u64,
    pub incorrect: u64,
}

impl Cell {
    pub fn total(&self) -> u64 {
        self.correct + self.incorrect
    }
}

impl AddAssign for Cell {
    fn add_assign(&mut self, other: Cell) {
        self.correct += other.correct;
        self.incorrect += other.incorrect;
    }
}

/// Final-state outcome of one submission.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub task_key: String,
    pub language: String,
    /// `None` when the final state could not be scored.
    pub score: Option<Score>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolutionCountMatrix {
    pub tasks: Vec<String>,
    pub languages: Vec<String>,
    /// `cells[task][language]`.
    pub cells: Vec<Vec<Cell>>,
    pub row_totals: Vec<Cell>,
    pub column_totals: Vec<Cell>,
    pub grand_total: Cell,
    pub threshold: f64,
    /// Submissions left out because their final state could not be scored.
    pub unscored: u64,
}

fn is_correct(score: &Score, threshold: f64) -> bool {
    if threshold >= 1.0 {
        score.is_perfect()
    } else {
        score.value() >= threshold
    }
}

/// `preferred` first (all of them, even if empty), then any other observed
/// keys in sorted order.
fn ordered(preferred: &[String], observed: BTreeSet<&str>) -> Vec<String> {
    let mut out: Vec<String> = preferred.to_vec();
    out.extend(
        observed
            .into_iter()
            .filter(|k| !preferred.iter().any(|p| p == k))
            .map(String::from),
    );
    out
}

pub fn solution_counts(
    outcomes: &[Outcome],
    task_order: &[String],
    language_order: &[String],
    threshold: f64,
) -> SolutionCountMatrix {
    let tasks = ordered(task_order, outcomes.iter().map(|o| o.task_key.as_str()).collect());
    let languages = ordered(language_order, outcomes.iter().map(|o| o.language.as_str()).collect());
    let t_index: BTreeMap<&str, usize> = tasks.iter().enumerate().map(|(i, t)| (t.as_str(), i)).collect();
    let l_index: BTreeMap<&str, usize> =
        languages.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();

    let mut cells = vec![vec![Cell::default(); languages.len()]; tasks.len()];
    let mut unscored = 0;
    for o in outcomes {
        let Some(score) = &o.score else {
            unscored += 1;
            continue;
        };
        let cell = &mut cells[t_index[o.task_key.as_str()]][l_index[o.language.as_str()]];
        if is_correct(score, threshold) {
            cell.correct += 1;
        } else {
            cell.incorrect += 1;
        }
    }

    let mut row_totals = vec![Cell::default(); tasks.len()];
    let mut column_totals = vec![Cell::default(); languages.len()];
    let mut grand_total = Cell::default();
    for (t, row) in cells.iter().enumerate() {
        for (l, &cell) in row.iter().enumerate() {
            row_totals[t] += cell;
            column_totals[l] += cell;
            grand_total += cell;
        }
    }
    SolutionCountMatrix {
        tasks,
        languages,
        cells,
        row_totals,
        column_totals,
        grand_total,
        threshold,
        unscored,
    }
}

pub fn language_label(language: &str) -> String {
    match language {
        "python" => "Python".into(),
        "java" => "Java".into(),
        "kotlin" => "Kotlin".into(),
        "cpp" => "C++".into(),
        other => other.to_string(),
    }
}

impl SolutionCountMatrix {
    /// Checks that every margin is the sum of its cells.
    pub fn margins_consistent(&self) -> bool {
        let sum = |cells: &mut dyn Iterator<Item = Cell>| {
            cells.fold(Cell::default(), |mut acc, c| {
                acc += c;
                acc
            })
        };
        let rows_ok = self
            .cells
            .iter()
            .zip(&self.row_totals)
            .all(|(row, total)| sum(&mut row.iter().copied()) == *total);
        let cols_ok = (0..self.languages.len())
            .all(|l| sum(&mut self.cells.iter().map(|row| row[l])) == self.column_totals[l]);
        rows_ok
            && cols_ok
            && sum(&mut self.row_totals.iter().copied()) == self.grand_total
            && sum(&mut self.column_totals.iter().copied()) == self.grand_total
    }

    /// S/NS column pairs per language plus All, one row per task and a
    /// closing All row. `task_names` maps keys to display names.
    pub fn to_markdown(&self, task_names: &BTreeMap<String, String>) -> String {
        let mut out = String::from("| Task |");
        for l in &self.languages {
            let label = language_label(l);
            write!(out, " {label} S | {label} NS |").unwrap();
        }
        out.push_str(" All S | All NS |\n|---|");
        for _ in 0..=self.languages.len() {
            out.push_str("---:|---:|");
        }
        out.push('\n');
        let mut row = |name: &str, cells: &[Cell], total: Cell, bold: bool| {
            let wrap = |s: String| if bold { format!("**{s}**") } else { s };
            write!(out, "| {} |", wrap(name.to_string())).unwrap();
            for c in cells {
                write!(out, " {} | {} |", wrap(c.correct.to_string()), wrap(c.incorrect.to_string())).unwrap();
            }
            writeln!(
                out,
                " **{}** | **{}** |",
                total.correct, total.incorrect
            )
            .unwrap();
        };
        for (t, task) in self.tasks.iter().enumerate() {
            let name = task_names.get(task).map(String::as_str).unwrap_or(task);
            row(name, &self.cells[t], self.row_totals[t], false);
        }
        row("All", &self.column_totals, self.grand_total, true);
        out
    }
}

/// Scores the last snapshot of every submission. Submissions whose task or
/// runner is unknown, or whose scoring failed, come back with `score: None`.
pub fn score_final_snapshots(dataset: &Dataset, tasks: &[TaskSpec], runners: &Runners) -> Vec<Outcome> {
    dataset
        .submissions
        .par_iter()
        .map(|s| {
            let session = &s.session;
            let score = find_task(tasks, &session.task_key)
                .zip(runners.get(&session.language).ok())
                .zip(session.snapshots.last())
                .and_then(|((task, runner), last)| score_solution(task, &last.fragment, runner).ok());
            Outcome {
                task_key: session.task_key.clone(),
                language: session.language.clone(),
                score,
            }
        })
        .collect()
}
