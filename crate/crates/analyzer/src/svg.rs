//! Deterministic SVG rendering of a `PlotSpec`.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::plot::{MarkerCategory, PlotSpec, SeriesKind};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 72.0;
const TICKS: usize = 5;
const FONT: &str = "font-family=\"DejaVu Sans, sans-serif\" font-size=\"12\"";

pub fn escape_xml(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c if (c as u32) < 0x20 && c != '\t' && c != '\n' && c != '\r' => out.push('\u{fffd}'),
            c => out.push(c),
        }
    }
    out
}

fn marker_color(category: MarkerCategory) -> &'static str {
    match category {
        MarkerCategory::Paste => "#d62728",
        MarkerCategory::Copy => "#ff7f0e",
        MarkerCategory::Run => "#2ca02c",
        MarkerCategory::Debug => "#9467bd",
        MarkerCategory::Lifecycle => "#7f7f7f",
        MarkerCategory::Other => "#17becf",
    }
}

/// Red at 0, green at 1.
fn score_color(value: f64) -> String {
    let v = value.clamp(0.0, 1.0);
    let r = (220.0 * (1.0 - v)).round() as u8;
    let g = (60.0 + 140.0 * v).round() as u8;
    format!("#{r:02x}{g:02x}50")
}

/// Shortest fixed-point form with at most two decimals.
fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

struct Scale {
    lo: f64,
    hi: f64,
    from: f64,
    to: f64,
}

impl Scale {
    fn new(lo: f64, hi: f64, from: f64, to: f64) -> Self {
        let hi = if hi > lo { hi } else { lo + 1.0 };
        Scale { lo, hi, from, to }
    }

    fn map(&self, v: f64) -> f64 {
        self.from + (v - self.lo) / (self.hi - self.lo) * (self.to - self.from)
    }
}

fn axis_label(axis: &crate::plot::Axis) -> String {
    match &axis.unit {
        Some(unit) => format!("{} ({unit})", axis.label),
        None => axis.label.clone(),
    }
}

pub fn render_svg(spec: &PlotSpec) -> String {
    let plot_right = WIDTH - RIGHT;
    let plot_bottom = HEIGHT - BOTTOM;
    let t_max = spec
        .series
        .iter()
        .map(|p| p.t)
        .chain(spec.markers.iter().map(|m| m.t))
        .fold(0.0, f64::max);
    let y_max = match spec.kind {
        SeriesKind::Step => 1.0,
        SeriesKind::Line => spec.series.iter().map(|p| p.value).fold(0.0, f64::max),
    };
    let x = Scale::new(0.0, t_max, LEFT, plot_right);
    let y = Scale::new(0.0, y_max, plot_bottom, TOP);

    let mut out = String::new();
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    )
    .unwrap();
    writeln!(out, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>").unwrap();
    writeln!(
        out,
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" {FONT} font-weight=\"bold\">{}</text>",
        num(WIDTH / 2.0),
        escape_xml(&spec.title)
    )
    .unwrap();

    if let Some(bands) = &spec.color_bands {
        for (i, band) in bands.iter().enumerate() {
            let (Some(from), Some(to)) = (spec.series.get(band.from_index), spec.series.get(band.to_index)) else {
                continue;
            };
            let end_t = bands
                .get(i + 1)
                .and_then(|next| spec.series.get(next.from_index))
                .map_or(to.t.max(t_max), |p| p.t);
            let (x0, x1) = (x.map(from.t), x.map(end_t));
            writeln!(
                out,
                "<rect class=\"band\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" fill-opacity=\"0.25\"><title>score {}</title></rect>",
                num(x0),
                num(TOP),
                num((x1 - x0).max(1.0)),
                num(plot_bottom - TOP),
                score_color(band.score_value),
                num(band.score_value)
            )
            .unwrap();
        }
    }

    // Axes and ticks.
    writeln!(
        out,
        "<path d=\"M{} {}V{}H{}\" stroke=\"#000000\" fill=\"none\"/>",
        num(LEFT),
        num(TOP),
        num(plot_bottom),
        num(plot_right)
    )
    .unwrap();
    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let (tv, yv) = (x.lo + f * (x.hi - x.lo), y.lo + f * (y.hi - y.lo));
        let (px, py) = (x.map(tv), y.map(yv));
        writeln!(
            out,
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#000000\"/><text x=\"{0}\" y=\"{3}\" text-anchor=\"middle\" {FONT}>{4}</text>",
            num(px),
            num(plot_bottom),
            num(plot_bottom + 5.0),
            num(plot_bottom + 18.0),
            num(tv)
        )
        .unwrap();
        writeln!(
            out,
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#000000\"/><text x=\"{3}\" y=\"{4}\" text-anchor=\"end\" {FONT}>{5}</text>",
            num(LEFT - 5.0),
            num(py),
            num(LEFT),
            num(LEFT - 8.0),
            num(py + 4.0),
            num(yv)
        )
        .unwrap();
    }
    writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" {FONT}>{}</text>",
        num((LEFT + plot_right) / 2.0),
        num(plot_bottom + 36.0),
        escape_xml(&axis_label(&spec.x_axis))
    )
    .unwrap();
    writeln!(
        out,
        "<text transform=\"translate(16 {}) rotate(-90)\" text-anchor=\"middle\" {FONT}>{}</text>",
        num((TOP + plot_bottom) / 2.0),
        escape_xml(&axis_label(&spec.y_axis))
    )
    .unwrap();

    for m in &spec.markers {
        let px = num(x.map(m.t));
        writeln!(
            out,
            "<line class=\"marker\" x1=\"{px}\" y1=\"{}\" x2=\"{px}\" y2=\"{}\" stroke=\"{}\" stroke-dasharray=\"3 2\"><title>{} at {}s</title></line>",
            num(TOP),
            num(plot_bottom),
            marker_color(m.category),
            escape_xml(&m.label),
            num(m.t)
        )
        .unwrap();
    }

    if !spec.series.is_empty() {
        let mut d = String::new();
        for (i, p) in spec.series.iter().enumerate() {
            let (px, py) = (num(x.map(p.t)), num(y.map(p.value)));
            match (i, spec.kind) {
                (0, _) => write!(d, "M{px} {py}").unwrap(),
                (_, SeriesKind::Line) => write!(d, "L{px} {py}").unwrap(),
                (_, SeriesKind::Step) => write!(d, "H{px}V{py}").unwrap(),
            }
        }
        if spec.kind == SeriesKind::Step {
            write!(d, "H{}", num(x.map(t_max))).unwrap();
        }
        writeln!(
            out,
            "<path class=\"series\" d=\"{d}\" stroke=\"#1f77b4\" stroke-width=\"2\" fill=\"none\"/>"
        )
        .unwrap();
    }

    let categories: BTreeSet<MarkerCategory> = spec.markers.iter().map(|m| m.category).collect();
    for (i, c) in categories.into_iter().enumerate() {
        let lx = LEFT + 100.0 * i as f64;
        let ly = HEIGHT - 14.0;
        writeln!(
            out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"3\"/><text x=\"{}\" y=\"{}\" {FONT}>{}</text>",
            num(lx),
            num(ly - 4.0),
            num(lx + 16.0),
            num(ly - 4.0),
            marker_color(c),
            num(lx + 20.0),
            num(ly),
            c.as_str()
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}
