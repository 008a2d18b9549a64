//! Offline processing of collected sessions: stream merging, scoring
//! against task tests, granularity filtering and code anonymization.

pub mod anonymize;
pub mod filter;
pub mod merge;
pub mod score;

pub use anonymize::{anonymize_code, AnonymizeError, IdentifierMap};
pub use codetrail_core::runner::RunnerConfig;
pub use filter::{filter_intermediate, kept_indices, FinalityCriterion};
pub use merge::{merge_streams, MergeError, MergedRow, RowKind};
pub use score::{
    outputs_match, score_solution, score_timeline, Runners, ScoreError, TimelineEntry,
};
