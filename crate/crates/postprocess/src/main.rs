use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use codetrail_core::session::load_session_dir;
use codetrail_core::tasks::{find_task, load_task_set};
use codetrail_core::{decode_actions, decode_snapshots, encode_snapshots};
use codetrail_postprocess::{
    anonymize_code, filter_intermediate, merge_streams, score_solution, score_timeline,
    FinalityCriterion, Runners,
};

#[derive(Parser)]
#[command(name = "postprocess", about = "Process collected solution sessions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Merge a snapshot log and an action log into one chronological list.
    Merge {
        #[arg(long)]
        snapshots: PathBuf,
        #[arg(long)]
        actions: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score one source file against a task's tests.
    Score {
        #[arg(long)]
        task_set: PathBuf,
        #[arg(long)]
        task: String,
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        runner: PathBuf,
        #[arg(long, default_value = "python")]
        language: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score every kept snapshot of a submission folder.
    ScoreTimeline {
        #[arg(long)]
        session: PathBuf,
        #[arg(long)]
        task_set: PathBuf,
        #[arg(long)]
        runner: PathBuf,
        #[arg(long, default_value = "lineCompleted")]
        criterion: FinalityCriterion,
        #[arg(long)]
        out: PathBuf,
    },
    /// Drop intermediate snapshots.
    Filter {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        criterion: FinalityCriterion,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rename identifiers; the mapping is written next to the output as
    /// `<out>.map.json`.
    Anonymize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        lang: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Merge {
            snapshots,
            actions,
            out,
        } => {
            let snapshots = decode_snapshots(&read(&snapshots)?)?;
            let actions = decode_actions(&read(&actions)?)?;
            write_json(&out, &merge_streams(&snapshots, &actions)?)?;
        }
        Command::Score {
            task_set,
            task,
            code,
            runner,
            language,
            out,
        } => {
            let tasks = load_task_set(&task_set)?;
            let task = find_task(&tasks, &task).ok_or_else(|| anyhow!("unknown task {task:?}"))?;
            let runners = Runners::load(&runner)?;
            let score = score_solution(task, &read(&code)?, runners.get(&language)?)?;
            match out {
                Some(out) => write_json(&out, &score)?,
                None => println!("{}", serde_json::to_string(&score)?),
            }
        }
        Command::ScoreTimeline {
            session,
            task_set,
            runner,
            criterion,
            out,
        } => {
            let session = load_session_dir(&session)?;
            let tasks = load_task_set(&task_set)?;
            let task = find_task(&tasks, &session.task_key)
                .ok_or_else(|| anyhow!("unknown task {:?}", session.task_key))?;
            let runners = Runners::load(&runner)?;
            let timeline = score_timeline(&session, task, criterion, runners.get(&session.language)?);
            write_json(&out, &timeline)?;
        }
        Command::Filter {
            input,
            criterion,
            out,
        } => {
            let snapshots = decode_snapshots(&read(&input)?)?;
            let kept = filter_intermediate(&snapshots, criterion);
            fs::write(&out, encode_snapshots(&kept))?;
        }
        Command::Anonymize { input, lang, out } => {
            let (code, map) = anonymize_code(&read(&input)?, &lang)?;
            fs::write(&out, code)?;
            let mut map_path = out.into_os_string();
            map_path.push(".map.json");
            write_json(Path::new(&map_path), &map)?;
        }
    }
    Ok(())
}
