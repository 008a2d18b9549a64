//! Read-only analysis of a collected corpus: participant statistics, the
//! solution count matrix and per-session plots rendered to SVG.

pub mod counts;
pub mod dataset;
pub mod plot;
pub mod stats;
pub mod svg;

pub use counts::{
    score_final_snapshots, solution_counts, Cell, Outcome, SolutionCountMatrix, DEFAULT_THRESHOLD,
    LANGUAGE_ORDER,
};
pub use dataset::{CorruptSubmission, Dataset, Submission};
pub use plot::{
    action_timeline, score_plot, session_action_timeline, Axis, ColorBand, Marker, MarkerCategory,
    PlotError, PlotSpec, Point, SeriesKind,
};
pub use stats::{participant_stats, ParticipantStats};
pub use svg::render_svg;
