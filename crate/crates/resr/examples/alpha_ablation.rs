//! Retrieval-seeding ablation: run the same searches with alpha = 0 (pure
//! random initialization) and alpha = 0.75 (three quarters of each initial
//! population seeded from retrieval) and compare recovery quality and
//! early-iteration validation error.
//!
//! Run with: `cargo run --release --example alpha_ablation`

use resr::bank::load_default_bank;
use resr::dynamics::SystemKind;
use resr::pipeline::{run_benchmark, BenchConfig};
use resr::search::SearchConfig;

fn main() {
    let bank = load_default_bank().bank;
    let config = BenchConfig {
        systems: vec![SystemKind::SpringMass],
        seeds: vec![1, 2],
        alphas: vec![0.0, 0.75],
        search: SearchConfig {
            n_iterations: 30,
            n_populations: 2,
            population_size: 30,
            ..SearchConfig::default()
        },
        ..BenchConfig::default()
    };
    let report = run_benchmark(&config, &bank);

    println!("system      alpha  TED(canonical)  test MSE (px^2)");
    for &alpha in &config.alphas {
        let ted = report
            .group_mean(SystemKind::SpringMass, alpha, |r| r.ted_canonical)
            .unwrap_or(f64::NAN);
        let mse = report
            .group_mean(SystemKind::SpringMass, alpha, |r| r.test_mse)
            .unwrap_or(f64::NAN);
        println!("spring_mass {alpha:<6} {ted:<15.3} {mse:.3}");
    }

    println!("\nmean best-validation MSE at iteration 10:");
    for &alpha in &config.alphas {
        let val = report
            .group_val_mse_at_iteration(SystemKind::SpringMass, alpha, 10)
            .unwrap_or(f64::NAN);
        println!("  alpha {alpha}: {val:.4}");
    }
    println!("\nfull per-run detail:\n{}", report.report_csv());
}
