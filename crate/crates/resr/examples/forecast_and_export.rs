//! Forecast future motion from discovered equations and export the
//! trajectory in the sparse coordinate format downstream consumers expect
//! (2 points per second, rescaled to a target resolution).
//!
//! Run with: `cargo run --release --example forecast_and_export`

use resr::bank::load_default_bank;
use resr::dynamics::{generate, SystemKind, SystemSpec};
use resr::ingest::temporal_split;
use resr::pipeline::{discover, forecast, render_export, ExportFormat, ExportOptions};
use resr::search::SearchConfig;

fn main() {
    let bank = load_default_bank().bank;
    let spec = SystemSpec::with_defaults(SystemKind::Projectile);
    let gt = generate(&spec, 5).expect("valid spec");
    let split = temporal_split(&gt.trajectory).expect("enough samples");
    let config = SearchConfig {
        n_iterations: 25,
        n_populations: 2,
        population_size: 24,
        alpha: 0.75,
        seed: 5,
        ..SearchConfig::default()
    };
    let result = discover(&split, &bank, &config, None).expect("discovery runs");
    println!("discovered x(t) = {}", result.f_x);
    println!("discovered y(t) = {}", result.f_y);

    // 5 seconds beyond the observed window on the native grid
    let steps = (5.0 / result.dt).round() as usize;
    let fc = forecast(&result, steps, None).expect("finite forecast");
    println!(
        "forecast: {} steps of {} s starting after t = {} s",
        fc.horizon, fc.dt, fc.t_start
    );

    let opts = ExportOptions {
        points_per_second: 2.0,
        source_resolution: (640, 480),
        target_resolution: (320, 240),
    };
    let json = render_export(&fc, ExportFormat::Json, &opts);
    println!("\nexport payload (10 pairs at 2 pts/s, 320x240):");
    println!("{json}");
}
