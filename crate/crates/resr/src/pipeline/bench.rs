//! Benchmark harness: systems x seeds x alpha values, each cell an
//! independent deterministic job (generate -> split -> discover), with
//! aggregate tables and per-iteration convergence curves as CSV.

use super::discover::{discover, DiscoveryResult};
use crate::bank::EquationBank;
use crate::dynamics::{add_noise, generate, SystemKind, SystemSpec};
use crate::ingest::temporal_split;
use crate::search::SearchConfig;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub systems: Vec<SystemKind>,
    pub seeds: Vec<u64>,
    pub alphas: Vec<f64>,
    pub search: SearchConfig,
    pub noise_sigma: f64,
    /// Seed-driven initial-state variation passed to the generators.
    pub init_jitter: f64,
    pub duration: f64,
    pub sample_rate: f64,
}

impl Default for BenchConfig {
    /// Desk-scale profile: the three closed-form systems, three seeds,
    /// the retrieval-on/off comparison, 100 iterations x 4 populations.
    fn default() -> BenchConfig {
        BenchConfig {
            systems: vec![
                SystemKind::SpringMass,
                SystemKind::DampedSpringMass,
                SystemKind::Projectile,
            ],
            seeds: vec![1, 2, 3],
            alphas: vec![0.0, 0.75],
            search: SearchConfig {
                n_populations: 4,
                // constant refits get a little more room than the library
                // default; multi-parameter oscillator fits need it
                const_opt_evals: 250,
                offspring_fit_evals: 50,
                ..SearchConfig::default()
            },
            noise_sigma: 0.0,
            init_jitter: 0.2,
            duration: 5.0,
            sample_rate: 20.0,
        }
    }
}

impl BenchConfig {
    /// Paper-scale profile: every system, ten initial states, the full
    /// alpha sweep, 30 populations. Hours of compute; not a test gate.
    pub fn full_scale() -> BenchConfig {
        BenchConfig {
            systems: SystemKind::ALL.to_vec(),
            seeds: (1..=10).collect(),
            alphas: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            search: SearchConfig::default(),
            ..BenchConfig::default()
        }
    }

    fn cells(&self) -> Vec<BenchCell> {
        let mut out = Vec::new();
        for &system in &self.systems {
            for &seed in &self.seeds {
                for &alpha in &self.alphas {
                    out.push(BenchCell {
                        system,
                        seed,
                        alpha,
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchCell {
    pub system: SystemKind,
    pub seed: u64,
    pub alpha: f64,
}

/// Outcome of one benchmark cell. TED columns are absent for systems
/// without ground-truth equations and for failed runs.
#[derive(Debug, Clone)]
pub struct BenchRunRecord {
    pub system: SystemKind,
    pub seed: u64,
    pub alpha: f64,
    pub status: String,
    pub ted_ordered: Option<f64>,
    pub ted_canonical: Option<f64>,
    pub test_mse: Option<f64>,
    pub val_mse: Option<f64>,
    pub result: Option<DiscoveryResult>,
}

#[derive(Debug)]
pub struct BenchReport {
    pub records: Vec<BenchRunRecord>,
    pub n_iterations: usize,
}

fn mean_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some((x + y) / 2.0),
        _ => None,
    }
}

fn run_cell(cell: &BenchCell, cfg: &BenchConfig, bank: &EquationBank) -> BenchRunRecord {
    let mut record = BenchRunRecord {
        system: cell.system,
        seed: cell.seed,
        alpha: cell.alpha,
        status: String::from("ok"),
        ted_ordered: None,
        ted_canonical: None,
        test_mse: None,
        val_mse: None,
        result: None,
    };
    let attempt = || -> Result<DiscoveryResult, String> {
        let mut spec = SystemSpec::with_defaults(cell.system);
        spec.duration = cfg.duration;
        spec.sample_rate = cfg.sample_rate;
        spec.init_jitter = cfg.init_jitter;
        let gt = generate(&spec, cell.seed).map_err(|e| e.to_string())?;
        let observed = add_noise(&gt.trajectory, cfg.noise_sigma, cell.seed ^ 0x6e6f_6973);
        let split = temporal_split(&observed).map_err(|e| e.to_string())?;
        let search = SearchConfig {
            alpha: cell.alpha,
            seed: cell.seed,
            ..cfg.search.clone()
        };
        let truth = gt.analytic_x.as_ref().zip(gt.analytic_y.as_ref());
        discover(&split, bank, &search, truth).map_err(|e| e.to_string())
    };
    match attempt() {
        Ok(result) => {
            if result.divergent {
                record.status = String::from("divergent");
            }
            record.ted_ordered =
                mean_opt(result.ted_x.map(|r| r.ordered), result.ted_y.map(|r| r.ordered));
            record.ted_canonical = mean_opt(
                result.ted_x.map(|r| r.canonical),
                result.ted_y.map(|r| r.canonical),
            );
            record.test_mse = Some(result.test_mse);
            record.val_mse = Some((result.val_mse_x + result.val_mse_y) / 2.0);
            record.result = Some(result);
        }
        Err(message) => {
            record.status = format!("error: {message}");
        }
    }
    record
}

/// Run every cell (in parallel; the report is assembled in fixed cell
/// order, so output bytes are independent of the worker count).
pub fn run_benchmark(cfg: &BenchConfig, bank: &EquationBank) -> BenchReport {
    let cells = cfg.cells();
    let records: Vec<BenchRunRecord> = cells
        .par_iter()
        .map(|cell| run_cell(cell, cfg, bank))
        .collect();
    BenchReport {
        records,
        n_iterations: cfg.search.n_iterations,
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, std)
}

impl BenchReport {
    /// Per-run rows: `system,seed,alpha,status,...` metrics.
    pub fn report_csv(&self) -> String {
        let mut out = String::from(
            "system,seed,alpha,status,ted_ordered,ted_canonical,test_mse,val_mse,f_x,f_y\n",
        );
        for r in &self.records {
            let (fx, fy) = r
                .result
                .as_ref()
                .map(|res| (res.f_x.to_string(), res.f_y.to_string()))
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},\"{}\",\"{}\"\n",
                r.system.name(),
                r.seed,
                r.alpha,
                r.status,
                fmt_opt(r.ted_ordered),
                fmt_opt(r.ted_canonical),
                fmt_opt(r.test_mse),
                fmt_opt(r.val_mse),
                fx,
                fy,
            ));
        }
        out
    }

    /// Aggregate rows per (system, alpha): mean and std over completed
    /// seeds, the layout of the published comparison table.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from(
            "system,alpha,runs,ted_ordered_mean,ted_ordered_std,ted_canonical_mean,\
             ted_canonical_std,test_mse_mean,test_mse_std\n",
        );
        let mut groups: Vec<(SystemKind, f64)> = Vec::new();
        for r in &self.records {
            if !groups.contains(&(r.system, r.alpha)) {
                groups.push((r.system, r.alpha));
            }
        }
        for (system, alpha) in groups {
            let ok: Vec<&BenchRunRecord> = self
                .records
                .iter()
                .filter(|r| r.system == system && r.alpha == alpha && r.status == "ok")
                .collect();
            let collect = |f: fn(&BenchRunRecord) -> Option<f64>| -> Vec<f64> {
                ok.iter().filter_map(|r| f(r)).collect()
            };
            let stats = |values: Vec<f64>| -> (String, String) {
                if values.is_empty() {
                    (String::new(), String::new())
                } else {
                    let (m, s) = mean_std(&values);
                    (m.to_string(), s.to_string())
                }
            };
            let (tom, tos) = stats(collect(|r| r.ted_ordered));
            let (tcm, tcs) = stats(collect(|r| r.ted_canonical));
            let (mm, ms) = stats(collect(|r| r.test_mse));
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                system.name(),
                alpha,
                ok.len(),
                tom,
                tos,
                tcm,
                tcs,
                mm,
                ms,
            ));
        }
        out
    }

    /// Convergence curves: per (system, alpha, iteration), the mean over
    /// seeds of the front's best train/validation MSE (axes averaged).
    pub fn convergence_csv(&self) -> String {
        let mut out = String::from("system,alpha,iteration,train_mse_mean,val_mse_mean\n");
        let mut groups: Vec<(SystemKind, f64)> = Vec::new();
        for r in &self.records {
            if !groups.contains(&(r.system, r.alpha)) {
                groups.push((r.system, r.alpha));
            }
        }
        for (system, alpha) in groups {
            let results: Vec<&DiscoveryResult> = self
                .records
                .iter()
                .filter(|r| r.system == system && r.alpha == alpha && r.status == "ok")
                .filter_map(|r| r.result.as_ref())
                .collect();
            if results.is_empty() {
                continue;
            }
            for iteration in 1..=self.n_iterations {
                let mut train = Vec::new();
                let mut val = Vec::new();
                for res in &results {
                    for log in [&res.log_x, &res.log_y] {
                        if let Some(row) = log.rows.get(iteration - 1) {
                            train.push(row.best_train_mse);
                            val.push(row.best_val_mse);
                        }
                    }
                }
                if train.is_empty() {
                    continue;
                }
                let tm = train.iter().sum::<f64>() / train.len() as f64;
                let vm = val.iter().sum::<f64>() / val.len() as f64;
                out.push_str(&format!("{},{alpha},{iteration},{tm},{vm}\n", system.name()));
            }
        }
        out
    }

    /// Mean over completed seeds of one metric for a (system, alpha) group.
    pub fn group_mean(
        &self,
        system: SystemKind,
        alpha: f64,
        metric: fn(&BenchRunRecord) -> Option<f64>,
    ) -> Option<f64> {
        let values: Vec<f64> = self
            .records
            .iter()
            .filter(|r| r.system == system && r.alpha == alpha && r.status == "ok")
            .filter_map(metric)
            .collect();
        if values.is_empty() {
            None
        } else {
            Some(values.iter().sum::<f64>() / values.len() as f64)
        }
    }

    /// Mean over seeds/axes of the front's best-validation MSE at one
    /// iteration (1-based), for convergence-ordering checks.
    pub fn group_val_mse_at_iteration(
        &self,
        system: SystemKind,
        alpha: f64,
        iteration: usize,
    ) -> Option<f64> {
        let mut values = Vec::new();
        for r in &self.records {
            if r.system != system || r.alpha != alpha || r.status != "ok" {
                continue;
            }
            if let Some(res) = &r.result {
                for log in [&res.log_x, &res.log_y] {
                    if let Some(row) = log.rows.get(iteration - 1) {
                        values.push(row.best_val_mse);
                    }
                }
            }
        }
        if values.is_empty() {
            None
        } else {
            Some(values.iter().sum::<f64>() / values.len() as f64)
        }
    }
}
