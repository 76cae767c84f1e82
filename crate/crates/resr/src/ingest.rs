//! Tracked-point trajectory ingestion: CSV loading, temporal-variance
//! ranking, and the 80/10/10 temporal split.
//!
//! Input CSV schema: header `point_id,frame,x,y`, one row per tracked point
//! per frame. Frames convert to seconds as `t = frame / fps`; all downstream
//! math works in seconds.

use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

/// One tracked point's time series in image-space pixel coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub point_id: u32,
    /// `(t seconds, x px, y px)`, strictly increasing in `t`.
    pub samples: Vec<(f64, f64, f64)>,
    pub fps: f64,
}

impl Trajectory {
    /// Panics unless there are >= 2 samples, finite coordinates, and a
    /// strictly increasing time base.
    pub fn new(point_id: u32, samples: Vec<(f64, f64, f64)>, fps: f64) -> Trajectory {
        assert!(samples.len() >= 2, "trajectory needs at least 2 samples");
        assert!(fps > 0.0, "fps must be positive");
        assert!(
            samples.windows(2).all(|w| w[0].0 < w[1].0),
            "trajectory times must be strictly increasing"
        );
        assert!(
            samples
                .iter()
                .all(|s| s.0.is_finite() && s.1.is_finite() && s.2.is_finite()),
            "trajectory samples must be finite"
        );
        Trajectory {
            point_id,
            samples,
            fps,
        }
    }

    /// A split segment: same shape as a trajectory but may hold a single
    /// sample (a 10% slice of a 10-sample trajectory is one point).
    pub fn segment(point_id: u32, samples: Vec<(f64, f64, f64)>, fps: f64) -> Trajectory {
        assert!(!samples.is_empty(), "segment needs at least 1 sample");
        assert!(fps > 0.0, "fps must be positive");
        assert!(
            samples.windows(2).all(|w| w[0].0 < w[1].0),
            "segment times must be strictly increasing"
        );
        Trajectory {
            point_id,
            samples,
            fps,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn t_values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.0).collect()
    }

    pub fn xs(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.1).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.2).collect()
    }

    /// Population variance of x plus population variance of y: the motion
    /// magnitude score used for ranking.
    pub fn variance_score(&self) -> f64 {
        population_variance(&self.xs()) + population_variance(&self.ys())
    }
}

fn population_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n
}

/// A set of trajectories sharing one time base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySet {
    pub trajectories: Vec<Trajectory>,
    pub source: Option<String>,
    /// Query-point grid size of the upstream tracker, when known.
    pub grid_size: Option<u32>,
}

/// Contiguous train/validation/test segments of one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitTrajectory {
    pub train: Trajectory,
    pub validation: Trajectory,
    pub test: Trajectory,
    /// `(t_train_end, t_val_end)`: last times of the first two segments.
    pub boundaries: (f64, f64),
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("missing column `{column}` in header")]
    MissingColumn { column: String },
    #[error("row {row}: {source}")]
    BadRecord { row: usize, source: csv::Error },
    #[error("row {row}: field `{field}` is not a finite number")]
    BadNumber { row: usize, field: String },
    #[error("row {row}: duplicate frame {frame} for point {point_id}")]
    DuplicateFrame { row: usize, point_id: u32, frame: i64 },
    #[error("row {row}: frame {frame} out of order for point {point_id}")]
    NonMonotonicFrame { row: usize, point_id: u32, frame: i64 },
    #[error("point {point_id} has fewer than 2 samples")]
    TooShort { point_id: u32 },
    #[error("fps must be positive, got {fps}")]
    BadFps { fps: f64 },
}

#[derive(Debug, Error)]
#[error("trajectory has {len} samples; temporal split needs at least 10")]
pub struct SplitError {
    pub len: usize,
}

/// Load `point_id,frame,x,y` rows, grouping by point and converting frames
/// to seconds. An empty file with a valid header yields an empty set.
pub fn load_trajectories(path: &Path, fps: f64) -> Result<TrajectorySet, LoadError> {
    if !(fps > 0.0) {
        return Err(LoadError::BadFps { fps });
    }
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => LoadError::Io {
                path: path.display().to_string(),
                source: std::io::Error::other(e.to_string()),
            },
            _ => LoadError::BadRecord { row: 0, source: e },
        })?;

    let headers = reader
        .headers()
        .map_err(|e| LoadError::BadRecord { row: 0, source: e })?
        .clone();
    let col = |name: &str| -> Result<usize, LoadError> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| LoadError::MissingColumn {
                column: name.to_string(),
            })
    };
    let id_col = col("point_id")?;
    let frame_col = col("frame")?;
    let x_col = col("x")?;
    let y_col = col("y")?;

    // rows arrive grouped per point and frame-ordered in well-formed files;
    // out-of-order frames within one point are rejected, not silently sorted
    let mut groups: Vec<(u32, Vec<(i64, f64, f64)>)> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 2; // 1-based plus header line
        let record = record.map_err(|source| LoadError::BadRecord { row, source })?;
        let parse_num = |field: &str, col: usize| -> Result<f64, LoadError> {
            record
                .get(col)
                .and_then(|s| s.parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| LoadError::BadNumber {
                    row,
                    field: field.to_string(),
                })
        };
        let point_id = record
            .get(id_col)
            .and_then(|s| s.parse::<u32>().ok())
            .ok_or_else(|| LoadError::BadNumber {
                row,
                field: "point_id".to_string(),
            })?;
        let frame = record
            .get(frame_col)
            .and_then(|s| s.parse::<i64>().ok())
            .ok_or_else(|| LoadError::BadNumber {
                row,
                field: "frame".to_string(),
            })?;
        let x = parse_num("x", x_col)?;
        let y = parse_num("y", y_col)?;

        let group = match groups.iter_mut().find(|(id, _)| *id == point_id) {
            Some(g) => &mut g.1,
            None => {
                groups.push((point_id, Vec::new()));
                &mut groups.last_mut().unwrap().1
            }
        };
        if let Some(&(last_frame, _, _)) = group.last() {
            if frame == last_frame {
                return Err(LoadError::DuplicateFrame {
                    row,
                    point_id,
                    frame,
                });
            }
            if frame < last_frame {
                return Err(LoadError::NonMonotonicFrame {
                    row,
                    point_id,
                    frame,
                });
            }
        }
        group.push((frame, x, y));
    }

    let mut trajectories = Vec::with_capacity(groups.len());
    for (point_id, rows) in groups {
        if rows.len() < 2 {
            return Err(LoadError::TooShort { point_id });
        }
        let samples = rows
            .into_iter()
            .map(|(frame, x, y)| (frame as f64 / fps, x, y))
            .collect();
        trajectories.push(Trajectory::new(point_id, samples, fps));
    }
    Ok(TrajectorySet {
        trajectories,
        source: Some(path.display().to_string()),
        grid_size: None,
    })
}

/// Keep the `k` trajectories with the highest motion-magnitude score,
/// breaking ties toward the lower point id. Returns all if `k` exceeds the
/// set size.
pub fn select_top_k_by_variance(set: &TrajectorySet, k: usize) -> TrajectorySet {
    assert!(k >= 1, "k must be at least 1");
    let mut scored: Vec<(f64, &Trajectory)> = set
        .trajectories
        .iter()
        .map(|tr| (tr.variance_score(), tr))
        .collect();
    scored.sort_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then_with(|| a.1.point_id.cmp(&b.1.point_id))
    });
    TrajectorySet {
        trajectories: scored
            .into_iter()
            .take(k)
            .map(|(_, tr)| tr.clone())
            .collect(),
        source: set.source.clone(),
        grid_size: set.grid_size,
    }
}

/// Split 80%/10%/10% along time: boundaries at `floor(0.8 T)` and
/// `floor(0.9 T)` samples, remainder to the test segment.
pub fn temporal_split(traj: &Trajectory) -> Result<SplitTrajectory, SplitError> {
    let n = traj.len();
    if n < 10 {
        return Err(SplitError { len: n });
    }
    let train_end = (0.8 * n as f64).floor() as usize;
    let val_end = (0.9 * n as f64).floor() as usize;
    let train = traj.samples[..train_end].to_vec();
    let validation = traj.samples[train_end..val_end].to_vec();
    let test = traj.samples[val_end..].to_vec();
    let boundaries = (train[train.len() - 1].0, validation[validation.len() - 1].0);
    Ok(SplitTrajectory {
        train: Trajectory::segment(traj.point_id, train, traj.fps),
        validation: Trajectory::segment(traj.point_id, validation, traj.fps),
        test: Trajectory::segment(traj.point_id, test, traj.fps),
        boundaries,
    })
}
