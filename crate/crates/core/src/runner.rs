//! Subprocess execution with stdin feeding, output capture and a wall-clock
//! timeout. Shared by the tracker's run action and by offline scoring.

use std::collections::HashMap;
use std::io::{self, Read, Write};
use std::path::Path;
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use wait_timeout::ChildExt;

/// Exit code reported when a program is killed for exceeding its timeout.
pub const TIMEOUT_EXIT_CODE: i32 = -1;

/// Captured output is truncated beyond this many bytes per stream.
pub const OUTPUT_LIMIT: usize = 1 << 20;

pub const DEFAULT_TIMEOUT_MILLIS: u64 = 10_000;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("runner template is empty")]
    EmptyTemplate,
    #[error("runner template {0:?} does not reference {{file}}")]
    MissingFilePlaceholder(String),
    #[error("failed to start {program:?}: {source}")]
    Spawn {
        program: String,
        #[source]
        source: io::Error,
    },
    #[error("i/o error while running program: {0}")]
    Io(#[from] io::Error),
}

/// How to build and execute a solution written in one language family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunnerConfig {
    /// Whitespace-separated argv; `{file}`, `{dir}` and `{exe}` are expanded.
    pub command_template: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compile_template: Option<String>,
    #[serde(default = "default_timeout")]
    pub timeout_millis: u64,
    /// File name the source is written to before compiling or running.
    #[serde(default = "default_source_file")]
    pub source_file: String,
}

fn default_timeout() -> u64 {
    DEFAULT_TIMEOUT_MILLIS
}

fn default_source_file() -> String {
    "main.src".to_string()
}

impl RunnerConfig {
    pub fn new(command_template: impl Into<String>) -> Self {
        RunnerConfig {
            command_template: command_template.into(),
            compile_template: None,
            timeout_millis: DEFAULT_TIMEOUT_MILLIS,
            source_file: default_source_file(),
        }
    }

    pub fn validate(&self) -> Result<(), RunError> {
        if self.command_template.split_whitespace().next().is_none() {
            return Err(RunError::EmptyTemplate);
        }
        // A compiled program is usually run as {exe}; only the step that
        // reads the source has to name it.
        let reads_source = |t: &str| t.contains("{file}");
        let ok = match &self.compile_template {
            Some(c) => reads_source(c) || reads_source(&self.command_template),
            None => reads_source(&self.command_template),
        };
        if !ok {
            return Err(RunError::MissingFilePlaceholder(self.command_template.clone()));
        }
        Ok(())
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_millis(self.timeout_millis)
    }
}

/// Outcome of one program execution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunResult {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
    pub duration_millis: u64,
}

impl RunResult {
    pub fn timed_out(&self) -> bool {
        self.exit_code == TIMEOUT_EXIT_CODE
    }

    pub fn success(&self) -> bool {
        self.exit_code == 0
    }
}

/// Expands a command template into argv. Placeholders are substituted after
/// splitting, so paths containing spaces stay single arguments.
pub fn expand_template(
    template: &str,
    vars: &HashMap<&str, String>,
) -> Result<Vec<String>, RunError> {
    let argv: Vec<String> = template
        .split_whitespace()
        .map(|token| {
            vars.iter().fold(token.to_string(), |acc, (name, value)| {
                acc.replace(&format!("{{{name}}}"), value)
            })
        })
        .collect();
    if argv.is_empty() {
        return Err(RunError::EmptyTemplate);
    }
    Ok(argv)
}

/// Standard placeholder set for a source file located in `dir`.
pub fn template_vars(source: &Path, dir: &Path) -> HashMap<&'static str, String> {
    let mut vars = HashMap::new();
    vars.insert("file", source.display().to_string());
    vars.insert("dir", dir.display().to_string());
    vars.insert("exe", dir.join("solution.bin").display().to_string());
    vars
}

/// Runs `argv` in `cwd` with a cleared environment (only `PATH` is kept so
/// interpreters resolve), feeding `stdin` and killing the process once
/// `timeout` elapses.
pub fn run_command(
    argv: &[String],
    stdin: &str,
    cwd: &Path,
    timeout: Duration,
) -> Result<RunResult, RunError> {
    let (program, args) = argv.split_first().ok_or(RunError::EmptyTemplate)?;
    let mut cmd = Command::new(program);
    cmd.args(args)
        .current_dir(cwd)
        .env_clear()
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    if let Some(path) = std::env::var_os("PATH") {
        cmd.env("PATH", path);
    }
    #[cfg(unix)]
    {
        use std::os::unix::process::CommandExt;
        cmd.process_group(0);
    }

    let started = Instant::now();
    let mut child = cmd.spawn().map_err(|source| RunError::Spawn {
        program: program.clone(),
        source,
    })?;

    let mut child_stdin = child.stdin.take().expect("stdin is piped");
    let input = stdin.as_bytes().to_vec();
    let writer = thread::spawn(move || {
        // The program may exit without reading its input.
        let _ = child_stdin.write_all(&input);
    });
    let stdout = child.stdout.take().expect("stdout is piped");
    let stderr = child.stderr.take().expect("stderr is piped");
    let out_reader = thread::spawn(move || read_capped(stdout));
    let err_reader = thread::spawn(move || read_capped(stderr));

    let exit_code = match child.wait_timeout(timeout)? {
        Some(status) => exit_code_of(status),
        None => {
            kill_group(&mut child);
            child.wait()?;
            TIMEOUT_EXIT_CODE
        }
    };
    // Stray descendants would keep the output pipes open.
    kill_group(&mut child);
    let duration_millis = started.elapsed().as_millis() as u64;

    let _ = writer.join();
    let stdout = out_reader.join().unwrap_or_default();
    let stderr = err_reader.join().unwrap_or_default();

    Ok(RunResult {
        exit_code,
        stdout,
        stderr,
        duration_millis,
    })
}

#[cfg(unix)]
fn kill_group(child: &mut std::process::Child) {
    // The child leads its own process group, so -pid addresses all of it.
    unsafe {
        libc::kill(-(child.id() as libc::pid_t), libc::SIGKILL);
    }
    let _ = child.kill();
}

#[cfg(not(unix))]
fn kill_group(child: &mut std::process::Child) {
    let _ = child.kill();
}

fn read_capped(mut stream: impl Read) -> String {
    let mut kept = Vec::new();
    let mut buf = [0u8; 8192];
    loop {
        match stream.read(&mut buf) {
            Ok(0) | Err(_) => break,
            Ok(n) => {
                let room = OUTPUT_LIMIT.saturating_sub(kept.len());
                kept.extend_from_slice(&buf[..n.min(room)]);
            }
        }
    }
    String::from_utf8_lossy(&kept).into_owned()
}

#[cfg(unix)]
fn exit_code_of(status: std::process::ExitStatus) -> i32 {
    use std::os::unix::process::ExitStatusExt;
    status
        .code()
        .or_else(|| status.signal().map(|s| 128 + s))
        .unwrap_or(TIMEOUT_EXIT_CODE)
}

#[cfg(not(unix))]
fn exit_code_of(status: std::process::ExitStatus) -> i32 {
    status.code().unwrap_or(TIMEOUT_EXIT_CODE)
}
