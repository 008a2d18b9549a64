//! Local tracker daemon: keeps the survey, creates one draft file per task,
//! snapshots every observed change of the active draft, logs editor and run
//! events, and uploads finished attempts to the collection server.

pub mod api;
pub mod client;
pub mod config;
pub mod daemon;
pub mod error;
pub mod log;
pub mod watcher;

pub use client::{build_upload, ServerClient, UploadPayload};
pub use config::TrackerConfig;
pub use daemon::{ActiveTask, Phase, SessionState, Tracker};
pub use error::TrackerError;
