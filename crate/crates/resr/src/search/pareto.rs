//! Per-complexity hall of fame and the per-iteration convergence log.

use super::{mse, Candidate};
use std::collections::BTreeMap;

/// A front member: the best candidate seen at its complexity, with its
/// validation MSE cached from insertion time.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontEntry {
    pub candidate: Candidate,
    pub val_mse: f64,
}

/// Best (lowest train MSE) candidate per complexity level.
#[derive(Debug, Clone, Default)]
pub struct ParetoFront {
    best: BTreeMap<usize, FrontEntry>,
}

impl ParetoFront {
    pub fn new() -> ParetoFront {
        ParetoFront::default()
    }

    /// Insert if strictly better than the incumbent at this complexity.
    /// Returns true when the front changed.
    pub fn consider(&mut self, candidate: Candidate, validation: Option<&[(f64, f64)]>) -> bool {
        let complexity = candidate.complexity;
        let incumbent = self.best.get(&complexity);
        if incumbent.is_some_and(|e| e.candidate.train_mse <= candidate.train_mse) {
            return false;
        }
        let val_mse = validation
            .map(|series| mse(&candidate.expr, series))
            .unwrap_or(f64::NAN);
        self.best.insert(complexity, FrontEntry { candidate, val_mse });
        true
    }

    pub fn is_empty(&self) -> bool {
        self.best.is_empty()
    }

    /// All per-complexity bests, ascending complexity.
    pub fn entries(&self) -> impl Iterator<Item = &FrontEntry> {
        self.best.values()
    }

    /// The dominating front: ascending complexity with strictly decreasing
    /// train MSE.
    pub fn front(&self) -> Vec<&FrontEntry> {
        let mut out: Vec<&FrontEntry> = Vec::new();
        let mut best_so_far = f64::INFINITY;
        for entry in self.best.values() {
            if entry.candidate.train_mse < best_so_far {
                best_so_far = entry.candidate.train_mse;
                out.push(entry);
            }
        }
        out
    }

    pub fn best_train_mse(&self) -> f64 {
        self.best
            .values()
            .map(|e| e.candidate.train_mse)
            .fold(f64::INFINITY, f64::min)
    }

    /// Lowest cached validation MSE across the dominating front.
    pub fn best_val_mse(&self) -> f64 {
        self.front()
            .iter()
            .map(|e| e.val_mse)
            .fold(f64::INFINITY, f64::min)
    }

    /// Model selection: the front entry minimizing validation MSE, ties
    /// broken toward lower complexity. Candidates within a relative 1e-6
    /// of the minimum count as tied — float noise at the 1e-15 level must
    /// not pick an 8-node expression over an equivalent constant. Falls
    /// back to train MSE when no validation series was supplied.
    pub fn select_by_validation(&self) -> Option<&FrontEntry> {
        let front = self.front();
        if front.is_empty() {
            return None;
        }
        let key = |e: &FrontEntry| {
            if e.val_mse.is_nan() {
                e.candidate.train_mse
            } else {
                e.val_mse
            }
        };
        let best = front
            .iter()
            .map(|e| key(e))
            .fold(f64::INFINITY, f64::min);
        let cutoff = best * (1.0 + 1e-6) + 1e-12;
        front
            .into_iter()
            .filter(|e| key(e).total_cmp(&cutoff).is_le())
            .min_by(|a, b| {
                a.candidate
                    .complexity
                    .cmp(&b.candidate.complexity)
                    .then_with(|| key(a).total_cmp(&key(b)))
            })
    }
}

/// One convergence-log row.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationStats {
    pub iteration: usize,
    pub best_train_mse: f64,
    pub best_val_mse: f64,
    pub best_expr: String,
}

/// Per-iteration record of front quality (the data behind convergence
/// curves).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceLog {
    pub rows: Vec<IterationStats>,
}

impl ConvergenceLog {
    pub fn record(&mut self, iteration: usize, front: &ParetoFront) {
        let best_expr = front
            .select_by_validation()
            .map(|e| e.candidate.expr.to_string())
            .unwrap_or_default();
        self.rows.push(IterationStats {
            iteration,
            best_train_mse: front.best_train_mse(),
            best_val_mse: front.best_val_mse(),
            best_expr,
        });
    }

    /// `iteration,best_train_mse,best_val_mse,best_expr` rows.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("iteration,best_train_mse,best_val_mse,best_expr\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},\"{}\"\n",
                row.iteration, row.best_train_mse, row.best_val_mse, row.best_expr
            ));
        }
        out
    }
}

/// `complexity<TAB>mse<TAB>expression` rows for a front dump.
pub fn front_to_tsv(front: &ParetoFront) -> String {
    let mut out = String::from("complexity\tmse\texpression\n");
    for entry in front.front() {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            entry.candidate.complexity, entry.candidate.train_mse, entry.candidate.expr
        ));
    }
    out
}
