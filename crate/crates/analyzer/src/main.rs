use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use codetrail_analyzer::{
    participant_stats, render_svg, score_final_snapshots, score_plot, session_action_timeline,
    solution_counts, Dataset, PlotSpec, DEFAULT_THRESHOLD, LANGUAGE_ORDER,
};
use codetrail_core::session::load_session_dir;
use codetrail_core::tasks::{find_task, load_task_set};
use codetrail_postprocess::{score_timeline, FinalityCriterion, Runners};

#[derive(Parser)]
#[command(name = "analyze", about = "Analyze a collected corpus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Participant distributions.
    Stats {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Correct/incorrect final solutions per task and language. The output
    /// format follows the extension: `.md` or `.json`.
    Table {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        runners: PathBuf,
        #[arg(long)]
        task_set: PathBuf,
        /// Minimum score counted as correct.
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fragment length over time with action markers (`.svg` or `.json`).
    Timeline {
        #[arg(long)]
        session: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score over time (`.svg` or `.json`).
    ScorePlot {
        #[arg(long)]
        session: PathBuf,
        #[arg(long, default_value = "lineCompleted")]
        criterion: FinalityCriterion,
        #[arg(long)]
        task_set: PathBuf,
        #[arg(long)]
        runners: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

fn extension(path: &Path) -> &str {
    path.extension().and_then(|e| e.to_str()).unwrap_or("")
}

fn write_plot(path: &Path, spec: &PlotSpec) -> Result<()> {
    match extension(path) {
        "svg" => write_text(path, &render_svg(spec)),
        "json" => write_json(path, spec),
        other => Err(anyhow!("unsupported plot format {other:?} (expected svg or json)")),
    }
}

fn open_dataset(path: &Path) -> Result<Dataset> {
    let dataset = Dataset::open(path).with_context(|| format!("reading {}", path.display()))?;
    for c in &dataset.corrupt {
        eprintln!("skipped: {c}");
    }
    Ok(dataset)
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Stats { dataset, out } => {
            write_json(&out, &participant_stats(&open_dataset(&dataset)?))?;
        }
        Command::Table {
            dataset,
            runners,
            task_set,
            threshold,
            out,
        } => {
            if !(0.0..=1.0).contains(&threshold) {
                return Err(anyhow!("threshold must lie in [0, 1]"));
            }
            let dataset = open_dataset(&dataset)?;
            let tasks = load_task_set(&task_set)?;
            let runners = Runners::load(&runners)?;
            let outcomes = score_final_snapshots(&dataset, &tasks, &runners);
            let task_order: Vec<String> = tasks.iter().map(|t| t.key.clone()).collect();
            let languages: Vec<String> = LANGUAGE_ORDER.iter().map(|l| l.to_string()).collect();
            let matrix = solution_counts(&outcomes, &task_order, &languages, threshold);
            if matrix.unscored > 0 {
                eprintln!("{} submissions could not be scored", matrix.unscored);
            }
            match extension(&out) {
                "md" => {
                    let names: BTreeMap<String, String> = tasks
                        .iter()
                        .filter_map(|t| t.names.get("en").map(|n| (t.key.clone(), n.clone())))
                        .collect();
                    write_text(&out, &matrix.to_markdown(&names))?;
                }
                "json" => write_json(&out, &matrix)?,
                other => return Err(anyhow!("unsupported table format {other:?} (expected md or json)")),
            }
        }
        Command::Timeline { session, out } => {
            let session = load_session_dir(&session)?;
            write_plot(&out, &session_action_timeline(&session)?)?;
        }
        Command::ScorePlot {
            session,
            criterion,
            task_set,
            runners,
            out,
        } => {
            let session = load_session_dir(&session)?;
            let tasks = load_task_set(&task_set)?;
            let task = find_task(&tasks, &session.task_key)
                .ok_or_else(|| anyhow!("unknown task {:?}", session.task_key))?;
            let runners = Runners::load(&runners)?;
            let timeline = score_timeline(&session, task, criterion, runners.get(&session.language)?);
            let title = format!("Score: {} ({})", session.task_key, session.language);
            write_plot(&out, &score_plot(&timeline, title)?)?;
        }
    }
    Ok(())
}
