//! Export forecasts as downstream-consumable coordinate sequences.

use super::Forecast;
use serde::Serialize;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Csv,
}

impl ExportFormat {
    pub fn from_name(name: &str) -> Option<ExportFormat> {
        match name {
            "json" => Some(ExportFormat::Json),
            "csv" => Some(ExportFormat::Csv),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExportOptions {
    /// Output sampling rate; downstream video models consume sparse
    /// coordinate sequences (2 points per second by default).
    pub points_per_second: f64,
    pub source_resolution: (u32, u32),
    pub target_resolution: (u32, u32),
}

impl Default for ExportOptions {
    fn default() -> ExportOptions {
        ExportOptions {
            points_per_second: 2.0,
            source_resolution: (640, 480),
            target_resolution: (640, 480),
        }
    }
}

/// Resample the forecast to `points_per_second` by nearest-grid selection
/// and rescale coordinates from the source to the target resolution.
pub fn resample_for_export(fc: &Forecast, opts: &ExportOptions) -> Vec<(f64, f64)> {
    assert!(opts.points_per_second > 0.0, "points_per_second must be > 0");
    let duration = fc.horizon as f64 * fc.dt;
    let n_out = (duration * opts.points_per_second).round() as usize;
    let sx = opts.target_resolution.0 as f64 / opts.source_resolution.0 as f64;
    let sy = opts.target_resolution.1 as f64 / opts.source_resolution.1 as f64;
    (1..=n_out)
        .map(|j| {
            let offset = j as f64 / opts.points_per_second;
            let idx = ((offset / fc.dt).round() as usize).clamp(1, fc.horizon);
            let (_, x, y) = fc.samples[idx - 1];
            (x * sx, y * sy)
        })
        .collect()
}

#[derive(Serialize)]
struct ExportMeta {
    points_per_second: f64,
    source_resolution: (u32, u32),
    target_resolution: (u32, u32),
    horizon: usize,
    dt: f64,
    t_start: f64,
}

#[derive(Serialize)]
struct ExportFile {
    points: Vec<(f64, f64)>,
    meta: ExportMeta,
}

/// Render the export payload as a string (JSON object with `points` +
/// `meta`, or CSV with an `x,y` header).
pub fn render_export(fc: &Forecast, format: ExportFormat, opts: &ExportOptions) -> String {
    let points = resample_for_export(fc, opts);
    match format {
        ExportFormat::Json => {
            let file = ExportFile {
                points,
                meta: ExportMeta {
                    points_per_second: opts.points_per_second,
                    source_resolution: opts.source_resolution,
                    target_resolution: opts.target_resolution,
                    horizon: fc.horizon,
                    dt: fc.dt,
                    t_start: fc.t_start,
                },
            };
            serde_json::to_string_pretty(&file).expect("export payload serializes")
        }
        ExportFormat::Csv => {
            let mut out = String::from("x,y\n");
            for (x, y) in points {
                out.push_str(&format!("{x},{y}\n"));
            }
            out
        }
    }
}

pub fn export_trajectory(
    fc: &Forecast,
    format: ExportFormat,
    opts: &ExportOptions,
    path: &Path,
) -> std::io::Result<()> {
    let payload = render_export(fc, format, opts);
    let mut f = std::fs::File::create(path)?;
    f.write_all(payload.as_bytes())
}
