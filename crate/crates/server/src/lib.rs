//! Collection server: serves the task set and UI translations, issues
//! anonymous user ids, stores uploaded sessions and exports them as a zip.

pub mod app;
pub mod storage;
pub mod translations;

pub use app::{router, serve, ApiError, AppState, ConfigError, ConfigSources};
pub use storage::{NewSubmission, Storage, StorageError, SubmissionKey};
pub use translations::{TranslationBundle, TranslationError};
