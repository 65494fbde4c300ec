//! Report emission: verdict lists and numeric series as JSON, CSV or SVG.
//! Output depends only on the input, so repeated runs are byte-identical.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::verdict::VerdictReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Svg,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

impl std::fmt::Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
        })
    }
}

/// A numeric `(x, y)` series for plotting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(
        title: impl Into<String>,
        x_label: impl Into<String>,
        y_label: impl Into<String>,
        points: Vec<(f64, f64)>,
    ) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            points,
        }
    }
}

fn json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        context: "serialising report".into(),
        source,
    })?;
    s.push('\n');
    Ok(s)
}

/// Any serialisable row type as CSV with a header line.
pub fn csv_table<T: Serialize>(rows: &[T]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::NothingToReport);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Verdicts as a JSON array, a CSV table, or an SVG chart of the ratios
/// against the verdict index.
pub fn emit_verdicts(verdicts: &[VerdictReport], format: Format) -> Result<String> {
    if verdicts.is_empty() {
        return Err(Error::NothingToReport);
    }
    match format {
        Format::Json => json_string(verdicts),
        Format::Csv => csv_table(verdicts),
        Format::Svg => {
            let points = verdicts
                .iter()
                .enumerate()
                .map(|(i, v)| (i as f64, v.ratio))
                .collect();
            svg_polyline(&Series::new(
                "verdict ratios",
                "verdict index",
                "lhs / rhs",
                points,
            ))
        }
    }
}

pub fn emit_series(series: &Series, format: Format) -> Result<String> {
    if series.points.is_empty() {
        return Err(Error::NothingToReport);
    }
    match format {
        Format::Json => json_string(series),
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                x: f64,
                y: f64,
            }
            csv_table(
                &series
                    .points
                    .iter()
                    .map(|&(x, y)| Row { x, y })
                    .collect::<Vec<_>>(),
            )
        }
        Format::Svg => svg_polyline(series),
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 60.0;

/// Single-polyline chart with labelled axes; points are drawn in order of
/// increasing `x`, non-finite points are dropped.
pub fn svg_polyline(series: &Series) -> Result<String> {
    let mut pts: Vec<(f64, f64)> = series
        .points
        .iter()
        .copied()
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    if pts.is_empty() {
        return Err(Error::NothingToReport);
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (x0, x1) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.0), hi.max(p.0))
        });
    let (y0, y1) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.1), hi.max(p.1))
        });
    let span = |lo: f64, hi: f64| if hi > lo { hi - lo } else { 1.0 };
    let (sx, sy) = (span(x0, x1), span(y0, y1));
    let px = |x: f64| MARGIN + (x - x0) / sx * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / sy * (HEIGHT - 2.0 * MARGIN);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<title>{}</title>"#, escape(&series.title));
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        out,
        r#"<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"<line x1="{left}" y1="{bottom}" x2="{left}" y2="{top}" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0,
        escape(&series.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(&series.y_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="{left}" y="{}" font-size="11">{x0:.4}</text>"#,
        bottom + 15.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{right}" y="{}" font-size="11" text-anchor="end">{x1:.4}</text>"#,
        bottom + 15.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{bottom}" font-size="11" text-anchor="end">{y0:.4}</text>"#,
        left - 4.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{y1:.4}</text>"#,
        left - 4.0,
        top + 4.0
    );
    let coords: Vec<String> = pts
        .iter()
        .map(|&(x, y)| format!("{:.3},{:.3}", px(x), py(y)))
        .collect();
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#,
        coords.join(" ")
    );
    out.push_str("</svg>\n");
    Ok(out)
}

/// Writes `contents` to `path`, or to stdout when `path` is `None`.
pub fn write_output(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, contents).map_err(|source| Error::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}
