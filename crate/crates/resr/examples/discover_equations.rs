//! End-to-end equation discovery on a synthetic damped oscillator: generate
//! a trajectory, split it 80/10/10 along time, retrieve seeds from the
//! bank, evolve per axis, and report the validation-selected equations.
//!
//! Run with: `cargo run --release --example discover_equations`

use resr::bank::load_default_bank;
use resr::dynamics::{generate, SystemKind, SystemSpec};
use resr::ingest::temporal_split;
use resr::pipeline::discover;
use resr::search::SearchConfig;

fn main() {
    let bank = load_default_bank().bank;
    let spec = SystemSpec::with_defaults(SystemKind::DampedSpringMass);
    let gt = generate(&spec, 3).expect("valid spec");
    let split = temporal_split(&gt.trajectory).expect("enough samples");

    // a reduced budget so the example finishes in seconds; the benchmark
    // profile uses 100 iterations across more populations
    let config = SearchConfig {
        n_iterations: 40,
        n_populations: 2,
        population_size: 30,
        alpha: 0.75,
        seed: 3,
        ..SearchConfig::default()
    };
    let truth = gt.analytic_x.as_ref().zip(gt.analytic_y.as_ref());
    let result = discover(&split, &bank, &config, truth).expect("discovery runs");

    println!("ground truth x(t) = {}", gt.analytic_x.as_ref().unwrap());
    println!("discovered   x(t) = {}", result.f_x);
    println!("ground truth y(t) = {}", gt.analytic_y.as_ref().unwrap());
    println!("discovered   y(t) = {}", result.f_y);
    println!(
        "validation MSE: x {:.3e}, y {:.3e}; test MSE {:.3e} px^2",
        result.val_mse_x, result.val_mse_y, result.test_mse
    );
    if let (Some(tx), Some(ty)) = (result.ted_x, result.ted_y) {
        println!(
            "TED similarity: x {:.2} (canonical {:.2}), y {:.2}",
            tx.ordered, tx.canonical, ty.ordered
        );
    }
    println!("\nconvergence (every 10th iteration):");
    for row in result.log_x.rows.iter().step_by(10) {
        println!(
            "  iter {:3}  train {:.3e}  val {:.3e}",
            row.iteration, row.best_train_mse, row.best_val_mse
        );
    }
}
