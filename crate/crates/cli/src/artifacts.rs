//! Artifact files: CSV tables and JSON documents with a schema header, plus
//! the machine-readable diff used by `compare`.
//!
//! Every CSV starts with `# kind=<kind> schema=1`; every JSON document has
//! `kind` and `schema_version` fields. Writers are deterministic: fixed field
//! order, values formatted with Rust's shortest-roundtrip float display.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use subshift_spectra::IntervalSet;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ArtifactError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("artifact {path} has no schema header")]
    MissingHeader { path: String },
    #[error("artifact kinds differ: {a} vs {b}")]
    KindMismatch { a: String, b: String },
    #[error("cannot parse artifact {path}: {reason}")]
    Parse { path: String, reason: String },
}

pub fn csv_header(kind: &str) -> String {
    format!("# kind={kind} schema={SCHEMA_VERSION}\n")
}

pub fn write_csv(
    path: &Path,
    kind: &str,
    columns: &[&str],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<(), ArtifactError> {
    let mut out = csv_header(kind);
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ArtifactError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

pub fn interval_rows(level: usize, set: &IntervalSet) -> Vec<Vec<String>> {
    set.intervals()
        .iter()
        .enumerate()
        .map(|(i, &(l, r))| vec![level.to_string(), i.to_string(), fmt(l), fmt(r)])
        .collect()
}

pub fn fmt(x: f64) -> String {
    let mut s = String::new();
    write!(s, "{x:?}").unwrap();
    s
}

/// Kind sniffed from the first line (CSV) or the `kind` field (JSON).
pub fn artifact_kind(path: &Path) -> Result<String, ArtifactError> {
    let text = std::fs::read_to_string(path)?;
    let display = path.display().to_string();
    if let Some(rest) = text.strip_prefix("# kind=") {
        let kind = rest.split_whitespace().next().unwrap_or_default();
        return Ok(kind.to_string());
    }
    if text.trim_start().starts_with('{') {
        let v: serde_json::Value = serde_json::from_str(&text)?;
        if let Some(kind) = v.get("kind").and_then(|k| k.as_str()) {
            return Ok(kind.to_string());
        }
    }
    Err(ArtifactError::MissingHeader { path: display })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiffReport {
    pub kind: String,
    pub schema_version: u32,
    /// For interval artifacts: Lebesgue measure of the symmetric difference.
    pub symmetric_difference: Option<f64>,
    /// For numeric tables: largest absolute difference over shared cells.
    pub max_abs_delta: Option<f64>,
    pub rows_a: usize,
    pub rows_b: usize,
    pub within_tolerance: bool,
}

fn numeric_cells(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1) // column header
        .map(|l| {
            l.split(',')
                .map(|c| c.parse::<f64>().unwrap_or(f64::NAN))
                .collect()
        })
        .collect()
}

fn intervals_from_csv(text: &str, path: &Path) -> Result<IntervalSet, ArtifactError> {
    let mut intervals = Vec::new();
    for row in numeric_cells(text) {
        if row.len() < 4 || row[2].is_nan() || row[3].is_nan() {
            return Err(ArtifactError::Parse {
                path: path.display().to_string(),
                reason: "interval rows need (level, index, left, right)".into(),
            });
        }
        intervals.push((row[2], row[3]));
    }
    Ok(IntervalSet::from_intervals(intervals, 0.0))
}

/// Machine-readable diff of two artifacts of the same kind.
pub fn compare(path_a: &Path, path_b: &Path, tolerance: f64) -> Result<DiffReport, ArtifactError> {
    let kind_a = artifact_kind(path_a)?;
    let kind_b = artifact_kind(path_b)?;
    if kind_a != kind_b {
        return Err(ArtifactError::KindMismatch {
            a: kind_a,
            b: kind_b,
        });
    }
    let text_a = std::fs::read_to_string(path_a)?;
    let text_b = std::fs::read_to_string(path_b)?;
    let interval_kind = kind_a.contains("interval") || kind_a.contains("sigma");
    if interval_kind {
        let a = intervals_from_csv(&text_a, path_a)?;
        let b = intervals_from_csv(&text_b, path_b)?;
        let d = a.symmetric_difference_measure(&b);
        Ok(DiffReport {
            kind: kind_a,
            schema_version: SCHEMA_VERSION,
            symmetric_difference: Some(d),
            max_abs_delta: None,
            rows_a: a.count(),
            rows_b: b.count(),
            within_tolerance: d <= tolerance,
        })
    } else {
        let a = numeric_cells(&text_a);
        let b = numeric_cells(&text_b);
        let mut max_delta = 0.0f64;
        if a.len() != b.len() {
            max_delta = f64::INFINITY;
        }
        for (ra, rb) in a.iter().zip(b.iter()) {
            if ra.len() != rb.len() {
                max_delta = f64::INFINITY;
                break;
            }
            for (x, y) in ra.iter().zip(rb.iter()) {
                if x.is_nan() && y.is_nan() {
                    continue;
                }
                max_delta = max_delta.max((x - y).abs());
            }
        }
        Ok(DiffReport {
            kind: kind_a,
            schema_version: SCHEMA_VERSION,
            symmetric_difference: None,
            max_abs_delta: Some(max_delta),
            rows_a: a.len(),
            rows_b: b.len(),
            within_tolerance: max_delta <= tolerance,
        })
    }
}
