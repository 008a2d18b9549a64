//! Plot descriptions for a single session. Rendering lives in `svg`.

use codetrail_core::{ActionRecord, EventType, SnapshotRecord, SolutionSession};
use codetrail_postprocess::{merge_streams, MergeError, MergedRow, RowKind, TimelineEntry};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PlotError {
    #[error("session has no events to plot")]
    EmptySession,
    #[error("timeline has no scored entries")]
    EmptyTimeline,
    #[error(transparent)]
    Merge(#[from] MergeError),
    #[error("merged row {row} refers to a missing record")]
    DanglingRow { row: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    Line,
    Step,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MarkerCategory {
    Paste,
    Copy,
    Run,
    Debug,
    Lifecycle,
    Other,
}

impl MarkerCategory {
    pub fn of(action: &ActionRecord) -> Self {
        let id = action.action_id.to_ascii_lowercase();
        if id.contains("paste") {
            MarkerCategory::Paste
        } else if id.contains("copy") {
            MarkerCategory::Copy
        } else if id.contains("debug") {
            MarkerCategory::Debug
        } else if action.event_type == EventType::Run || id.contains("run") {
            MarkerCategory::Run
        } else if action.event_type == EventType::Lifecycle {
            MarkerCategory::Lifecycle
        } else {
            MarkerCategory::Other
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MarkerCategory::Paste => "paste",
            MarkerCategory::Copy => "copy",
            MarkerCategory::Run => "run",
            MarkerCategory::Debug => "debug",
            MarkerCategory::Lifecycle => "lifecycle",
            MarkerCategory::Other => "other",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub t: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Marker {
    pub t: f64,
    pub label: String,
    pub category: MarkerCategory,
}

/// Series points `from_index..=to_index` share `score_value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ColorBand {
    pub from_index: usize,
    pub to_index: usize,
    pub score_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlotSpec {
    pub title: String,
    pub x_axis: Axis,
    pub y_axis: Axis,
    pub kind: SeriesKind,
    pub series: Vec<Point>,
    pub markers: Vec<Marker>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color_bands: Option<Vec<ColorBand>>,
}

impl PlotSpec {
    pub fn empty(title: impl Into<String>) -> Self {
        PlotSpec {
            title: title.into(),
            x_axis: seconds_axis(),
            y_axis: Axis {
                label: String::new(),
                unit: None,
            },
            kind: SeriesKind::Line,
            series: Vec::new(),
            markers: Vec::new(),
            color_bands: None,
        }
    }

    /// Points and markers sorted by time, bands inside the series, ordered
    /// and non-overlapping.
    pub fn is_valid(&self) -> bool {
        let sorted_points = self.series.windows(2).all(|w| w[0].t <= w[1].t);
        let sorted_markers = self.markers.windows(2).all(|w| w[0].t <= w[1].t);
        let bands_ok = self.color_bands.as_ref().is_none_or(|bands| {
            bands.iter().all(|b| b.from_index <= b.to_index && b.to_index < self.series.len())
                && bands.windows(2).all(|w| w[0].to_index < w[1].from_index)
        });
        sorted_points && sorted_markers && bands_ok
    }
}

fn seconds_axis() -> Axis {
    Axis {
        label: "time".into(),
        unit: Some("seconds-from-start".into()),
    }
}

fn seconds(millis: i64, origin: i64) -> f64 {
    (millis - origin) as f64 / 1000.0
}

/// Fragment length over time with one marker per action.
pub fn action_timeline(
    rows: &[MergedRow],
    snapshots: &[SnapshotRecord],
    actions: &[ActionRecord],
    title: impl Into<String>,
) -> Result<PlotSpec, PlotError> {
    let origin = rows.first().ok_or(PlotError::EmptySession)?.timestamp_millis;
    let mut spec = PlotSpec::empty(title);
    spec.y_axis = Axis {
        label: "fragment length".into(),
        unit: Some("characters".into()),
    };
    for (i, row) in rows.iter().enumerate() {
        let t = seconds(row.timestamp_millis, origin);
        match row.kind {
            RowKind::Snapshot => {
                let s = snapshots.get(row.payload_ref).ok_or(PlotError::DanglingRow { row: i })?;
                spec.series.push(Point {
                    t,
                    value: s.fragment.chars().count() as f64,
                });
            }
            RowKind::Action => {
                let a = actions.get(row.payload_ref).ok_or(PlotError::DanglingRow { row: i })?;
                spec.markers.push(Marker {
                    t,
                    label: a.action_id.clone(),
                    category: MarkerCategory::of(a),
                });
            }
        }
    }
    Ok(spec)
}

pub fn session_action_timeline(session: &SolutionSession) -> Result<PlotSpec, PlotError> {
    let rows = merge_streams(&session.snapshots, &session.actions)?;
    action_timeline(
        &rows,
        &session.snapshots,
        &session.actions,
        format!("Actions: {} ({})", session.task_key, session.language),
    )
}

/// Step plot of the score over time. Entries that could not be scored are
/// left out; bands cover maximal runs of equal score.
pub fn score_plot(timeline: &[TimelineEntry], title: impl Into<String>) -> Result<PlotSpec, PlotError> {
    let scored: Vec<(i64, f64)> = timeline
        .iter()
        .filter_map(|e| e.score.map(|s| (e.timestamp_millis, s.value())))
        .collect();
    let origin = scored.first().ok_or(PlotError::EmptyTimeline)?.0;
    let mut spec = PlotSpec::empty(title);
    spec.kind = SeriesKind::Step;
    spec.y_axis = Axis {
        label: "score".into(),
        unit: None,
    };
    spec.series = scored
        .iter()
        .map(|&(ms, value)| Point {
            t: seconds(ms, origin),
            value,
        })
        .collect();

    let mut bands: Vec<ColorBand> = Vec::new();
    for (i, p) in spec.series.iter().enumerate() {
        match bands.last_mut() {
            Some(b) if b.score_value == p.value => b.to_index = i,
            _ => bands.push(ColorBand {
                from_index: i,
                to_index: i,
                score_value: p.value,
            }),
        }
    }
    spec.color_bands = Some(bands);
    Ok(spec)
}
