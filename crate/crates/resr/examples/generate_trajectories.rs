//! Synthetic trajectory generation for the classical-mechanics systems:
//! closed-form sampling where analytic solutions exist, fixed-step RK4 for
//! the pendulums, plus pixel mapping, seed jitter, and tracking noise.
//!
//! Run with: `cargo run --example generate_trajectories`

use resr::dynamics::{add_noise, generate, SystemKind, SystemSpec};

fn main() {
    // a spring-mass oscillator with the documented default parameters
    let mut spec = SystemSpec::with_defaults(SystemKind::SpringMass);
    spec.init_jitter = 0.2; // each seed perturbs amplitude and phase
    for seed in [1, 2] {
        let gt = generate(&spec, seed).expect("valid spec");
        let first = gt.trajectory.samples[0];
        println!(
            "spring_mass seed {seed}: {} samples, starts at ({:.1}, {:.1}) px",
            gt.trajectory.len(),
            first.1,
            first.2
        );
        println!("  x(t) = {}", gt.analytic_x.as_ref().expect("closed form"));
        println!("  y(t) = {}", gt.analytic_y.as_ref().expect("closed form"));
    }

    // pendulums are integrated numerically; no analytic expression exists
    let pendulum = SystemSpec::with_defaults(SystemKind::DoublePendulum);
    let gt = generate(&pendulum, 7).expect("valid spec");
    println!(
        "double_pendulum: {} samples, analytic equation attached: {}",
        gt.trajectory.len(),
        gt.analytic_x.is_some()
    );

    // simulated tracking jitter; sigma = 0 would return the input unchanged
    let noisy = add_noise(&gt.trajectory, 1.5, 42);
    let clean = &gt.trajectory.samples[10];
    let dirty = &noisy.samples[10];
    println!(
        "noise: sample 10 moved from ({:.2}, {:.2}) to ({:.2}, {:.2})",
        clean.1, clean.2, dirty.1, dirty.2
    );
}
