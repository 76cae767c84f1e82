//! Shape-based retrieval: normalized dynamic time warping between an
//! observed trajectory axis and bank-entry trajectories, ranked ascending.
//!
//! Normalization rescales the observed series into each entry's value range
//! before DTW so the comparison reflects shape, not offset or scale. Entries
//! that materialize to a constant carry no shape scale: they match constant
//! observations at distance 0 and anything else at infinity.

use crate::bank::{materialize, EquationBank};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One trajectory axis to search for, the grid to materialize entries on,
/// and how many entries to return.
#[derive(Debug, Clone)]
pub struct RetrievalQuery {
    /// `(t, value)` pairs of one axis of the observed trajectory.
    pub series: Vec<(f64, f64)>,
    pub k: usize,
}

impl RetrievalQuery {
    pub fn new(series: Vec<(f64, f64)>, k: usize) -> RetrievalQuery {
        assert!(series.len() >= 2, "query series needs at least 2 points");
        assert!(k >= 1, "k must be at least 1");
        RetrievalQuery { series, k }
    }

    pub fn t_values(&self) -> Vec<f64> {
        self.series.iter().map(|p| p.0).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.series.iter().map(|p| p.1).collect()
    }
}

/// One ranked hit: entry id, N-DTW distance, and the value bounds of the
/// entry-generated trajectory used for normalization.
///
/// The distance is the DTW path cost after both series are affinely mapped
/// to the unit range — the same cost as the observed-into-entry-range
/// mapping divided by the entry's range width. Without that division the
/// ranking is dominated by each entry's amplitude instead of its shape
/// (a constant prefactor would decide retrieval).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalHit {
    pub id: String,
    pub distance: f64,
    pub entry_bounds: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalResult {
    /// Non-decreasing by distance; length = min(k, bank size).
    pub hits: Vec<RetrievalHit>,
}

#[derive(Debug, Error)]
pub enum RetrievalError {
    #[error("cannot retrieve from an empty bank")]
    EmptyBank,
}

/// Affine rescale into `[target_min, target_max]`. A constant series maps to
/// the midpoint of the target range; a degenerate target range maps every
/// point to `target_min`.
pub fn rescale_to_range(series: &[f64], target_min: f64, target_max: f64) -> Vec<f64> {
    assert!(!series.is_empty(), "cannot rescale an empty series");
    if target_max == target_min {
        return vec![target_min; series.len()];
    }
    let v_min = series.iter().copied().fold(f64::INFINITY, f64::min);
    let v_max = series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if v_max == v_min {
        return vec![(target_min + target_max) / 2.0; series.len()];
    }
    series
        .iter()
        .map(|v| (target_max - target_min) * (v - v_min) / (v_max - v_min) + target_min)
        .collect()
}

/// Classic DTW with local cost `|a_i - b_j|`, steps {(1,0),(0,1),(1,1)},
/// boundary-to-boundary alignment.
pub fn dtw_distance(a: &[f64], b: &[f64]) -> f64 {
    dtw_distance_banded(a, b, None)
}

/// DTW with an optional Sakoe-Chiba band of half-width `band` around the
/// diagonal (off by default; `None` means unconstrained).
pub fn dtw_distance_banded(a: &[f64], b: &[f64], band: Option<usize>) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "DTW needs non-empty inputs");
    let (n, m) = (a.len(), b.len());
    // two-row rolling DP
    let mut prev = vec![f64::INFINITY; m];
    let mut curr = vec![f64::INFINITY; m];
    for i in 0..n {
        std::mem::swap(&mut prev, &mut curr);
        curr.fill(f64::INFINITY);
        let (lo, hi) = match band {
            Some(w) => {
                // scale the diagonal for unequal lengths
                let center = if n > 1 { i * (m - 1) / (n - 1) } else { 0 };
                (center.saturating_sub(w), (center + w + 1).min(m))
            }
            None => (0, m),
        };
        for j in lo..hi {
            let cost = (a[i] - b[j]).abs();
            let best = if i == 0 && j == 0 {
                0.0
            } else {
                let mut best = f64::INFINITY;
                if i > 0 {
                    best = best.min(prev[j]);
                }
                if j > 0 {
                    best = best.min(curr[j - 1]);
                }
                if i > 0 && j > 0 {
                    best = best.min(prev[j - 1]);
                }
                best
            };
            curr[j] = cost + best;
        }
    }
    curr[m - 1]
}

/// Rank every bank entry by N-DTW distance to the query axis and return the
/// top k. Entries are materialized on the query's own time grid; ties break
/// toward the lexicographically lower id; entries whose materialization is
/// non-finite on the grid rank last (infinite distance).
pub fn retrieve_top_k(
    query: &RetrievalQuery,
    bank: &EquationBank,
) -> Result<RetrievalResult, RetrievalError> {
    if bank.is_empty() {
        return Err(RetrievalError::EmptyBank);
    }
    let t_values = query.t_values();
    let observed = query.values();

    let mut scored: Vec<RetrievalHit> = bank
        .entries
        .par_iter()
        .map(|entry| {
            let generated = materialize(entry, &t_values);
            let finite: Vec<f64> = generated.iter().copied().filter(|v| v.is_finite()).collect();
            if finite.is_empty() || generated.iter().any(|v| !v.is_finite()) {
                return RetrievalHit {
                    id: entry.id.clone(),
                    distance: f64::INFINITY,
                    entry_bounds: (f64::NAN, f64::NAN),
                };
            }
            let g_min = finite.iter().copied().fold(f64::INFINITY, f64::min);
            let g_max = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let distance = if g_max == g_min {
                // constant entry: matches constant observations only
                let o_min = observed.iter().copied().fold(f64::INFINITY, f64::min);
                let o_max = observed.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if o_max == o_min {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                let obs_unit = rescale_to_range(&observed, 0.0, 1.0);
                let gen_unit = rescale_to_range(&generated, 0.0, 1.0);
                let d = dtw_distance(&obs_unit, &gen_unit);
                if d.is_nan() {
                    f64::INFINITY
                } else {
                    d
                }
            };
            RetrievalHit {
                id: entry.id.clone(),
                distance,
                entry_bounds: (g_min, g_max),
            }
        })
        .collect();

    scored.sort_by(|a, b| a.distance.total_cmp(&b.distance).then_with(|| a.id.cmp(&b.id)));
    scored.truncate(query.k);
    Ok(RetrievalResult { hits: scored })
}
