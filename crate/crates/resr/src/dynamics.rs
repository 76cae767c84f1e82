//! Synthetic trajectory generators for the classical-mechanics systems:
//! spring-mass, damped spring-mass, projectile, circular two-body, single
//! pendulum, and double pendulum.
//!
//! Closed-form systems are sampled from their analytic solutions and carry
//! the corresponding expressions in pixel coordinates. Pendulum systems are
//! integrated with fixed-step RK4 (no analytic expression exists for them).
//! All coordinates pass through an affine meters-to-pixels mapping.

use crate::expr::Expr;
use crate::ingest::Trajectory;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    SpringMass,
    DampedSpringMass,
    Projectile,
    TwoBody,
    SinglePendulum,
    DoublePendulum,
}

impl SystemKind {
    pub const ALL: [SystemKind; 6] = [
        SystemKind::SpringMass,
        SystemKind::DampedSpringMass,
        SystemKind::Projectile,
        SystemKind::TwoBody,
        SystemKind::SinglePendulum,
        SystemKind::DoublePendulum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SystemKind::SpringMass => "spring_mass",
            SystemKind::DampedSpringMass => "damped_spring_mass",
            SystemKind::Projectile => "projectile",
            SystemKind::TwoBody => "two_body",
            SystemKind::SinglePendulum => "single_pendulum",
            SystemKind::DoublePendulum => "double_pendulum",
        }
    }

    pub fn from_name(name: &str) -> Option<SystemKind> {
        SystemKind::ALL.iter().copied().find(|k| k.name() == name)
    }

    /// Closed-form systems carry ground-truth trajectory equations.
    pub fn has_analytic_equation(self) -> bool {
        matches!(
            self,
            SystemKind::SpringMass
                | SystemKind::DampedSpringMass
                | SystemKind::Projectile
                | SystemKind::TwoBody
        )
    }
}

/// Affine meters-to-pixels mapping: `px = scale * meters + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PixelMap {
    pub scale: f64,
    pub offset: (f64, f64),
}

impl Default for PixelMap {
    fn default() -> PixelMap {
        PixelMap {
            scale: 100.0,
            offset: (320.0, 240.0),
        }
    }
}

impl PixelMap {
    pub fn identity() -> PixelMap {
        PixelMap {
            scale: 1.0,
            offset: (0.0, 0.0),
        }
    }

    pub fn apply(&self, x_m: f64, y_m: f64) -> (f64, f64) {
        (
            self.scale * x_m + self.offset.0,
            self.scale * y_m + self.offset.1,
        )
    }
}

/// A physical system instance: kind, named parameters, sampling window, and
/// pixel mapping. `init_jitter` scales the seed-driven variation of initial
/// state (0 means every seed produces the same trajectory).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub kind: SystemKind,
    pub params: BTreeMap<String, f64>,
    pub duration: f64,
    pub sample_rate: f64,
    #[serde(default)]
    pub pixel_map: PixelMap,
    #[serde(default)]
    pub init_jitter: f64,
}

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("invalid system spec: {0}")]
    InvalidSpec(String),
    #[error("energy drift {relative:.4}% exceeds the 1% guard; reduce the step or duration")]
    EnergyDrift { relative: f64 },
}

/// Ground truth produced by a generator: the sampled trajectory, analytic
/// expressions in pixel coordinates when the system has them, and the
/// effective spec after seed-driven initial-state variation.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub trajectory: Trajectory,
    pub analytic_x: Option<Expr>,
    pub analytic_y: Option<Expr>,
    pub effective_spec: SystemSpec,
}

impl SystemSpec {
    /// Documented defaults for each system kind.
    pub fn with_defaults(kind: SystemKind) -> SystemSpec {
        let mut params = BTreeMap::new();
        let mut put = |k: &str, v: f64| {
            params.insert(k.to_string(), v);
        };
        match kind {
            SystemKind::SpringMass => {
                put("mass", 1.0);
                put("spring_k", 4.0);
                put("amplitude", 1.5);
                put("phase", 0.5);
                put("center_x", 0.0);
                put("center_y", 0.0);
            }
            SystemKind::DampedSpringMass => {
                put("mass", 1.0);
                put("spring_k", 9.0);
                put("damping", 0.3);
                put("amplitude", 1.5);
                put("phase", 0.5);
                put("center_x", 0.0);
                put("center_y", 0.0);
            }
            SystemKind::Projectile => {
                // a hard upward throw whose apex sits mid-window, so the
                // full arc is observable within the default 5 s duration
                put("x0", -2.0);
                put("y0", 0.5);
                put("vx", 1.2);
                put("vy", 24.5);
                put("gravity", 9.8);
            }
            SystemKind::TwoBody => {
                put("radius", 1.5);
                put("grav_param", 13.5);
                put("phase", 0.0);
                put("center_x", 0.0);
                put("center_y", 0.0);
            }
            SystemKind::SinglePendulum => {
                put("length", 1.0);
                put("gravity", 9.8);
                put("theta0", 0.6);
                put("omega0", 0.0);
            }
            SystemKind::DoublePendulum => {
                put("m1", 1.0);
                put("m2", 1.0);
                put("l1", 0.7);
                put("l2", 0.7);
                put("gravity", 9.8);
                put("theta1", 1.2);
                put("theta2", -0.6);
                put("omega1", 0.0);
                put("omega2", 0.0);
            }
        }
        SystemSpec {
            kind,
            params,
            duration: 5.0,
            sample_rate: 20.0,
            pixel_map: PixelMap::default(),
            init_jitter: 0.0,
        }
    }

    pub fn param(&self, name: &str) -> Result<f64, DynamicsError> {
        self.params.get(name).copied().ok_or_else(|| {
            DynamicsError::InvalidSpec(format!(
                "{} requires parameter `{name}`",
                self.kind.name()
            ))
        })
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.duration > 0.0) {
            return Err(DynamicsError::InvalidSpec("duration must be > 0".into()));
        }
        if !(self.sample_rate > 0.0) {
            return Err(DynamicsError::InvalidSpec("sample rate must be > 0".into()));
        }
        if !(self.pixel_map.scale > 0.0) {
            return Err(DynamicsError::InvalidSpec("pixel scale must be > 0".into()));
        }
        if !(0.0..=1.0).contains(&self.init_jitter) {
            return Err(DynamicsError::InvalidSpec(
                "init_jitter must be in [0, 1]".into(),
            ));
        }
        let strictly_positive: &[&str] = match self.kind {
            SystemKind::SpringMass => &["mass", "spring_k"],
            SystemKind::DampedSpringMass => &["mass", "spring_k"],
            SystemKind::Projectile => &["gravity"],
            SystemKind::TwoBody => &["radius", "grav_param"],
            SystemKind::SinglePendulum => &["length", "gravity"],
            SystemKind::DoublePendulum => &["m1", "m2", "l1", "l2", "gravity"],
        };
        for name in strictly_positive {
            if !(self.param(name)? > 0.0) {
                return Err(DynamicsError::InvalidSpec(format!(
                    "`{name}` must be strictly positive"
                )));
            }
        }
        if self.kind == SystemKind::DampedSpringMass {
            let gamma = self.param("damping")?;
            let omega0 = (self.param("spring_k")? / self.param("mass")?).sqrt();
            if gamma < 0.0 {
                return Err(DynamicsError::InvalidSpec("`damping` must be >= 0".into()));
            }
            if gamma >= omega0 {
                return Err(DynamicsError::InvalidSpec(format!(
                    "damping {gamma} >= natural frequency {omega0}: not underdamped"
                )));
            }
        }
        if self.kind == SystemKind::DoublePendulum && self.duration > 5.0 + 1e-9 {
            return Err(DynamicsError::InvalidSpec(
                "double pendulum horizons are capped at 5 s (chaotic sensitivity)".into(),
            ));
        }
        Ok(())
    }

    fn t_grid(&self) -> Vec<f64> {
        let n = (self.duration * self.sample_rate).floor() as usize + 1;
        (0..n).map(|i| i as f64 / self.sample_rate).collect()
    }

    /// Parameters subject to seed-driven variation, with their jitter style.
    fn jittered_params(&self) -> &'static [(&'static str, Jitter)] {
        match self.kind {
            SystemKind::SpringMass | SystemKind::DampedSpringMass => &[
                ("amplitude", Jitter::Relative),
                ("phase", Jitter::PhaseRadians),
            ],
            SystemKind::Projectile => &[
                ("x0", Jitter::AdditiveMeters),
                ("y0", Jitter::AdditiveMeters),
                ("vx", Jitter::Relative),
                ("vy", Jitter::Relative),
            ],
            SystemKind::TwoBody => &[
                ("radius", Jitter::Relative),
                ("phase", Jitter::PhaseRadians),
            ],
            SystemKind::SinglePendulum => &[
                ("theta0", Jitter::Relative),
                ("omega0", Jitter::Relative),
            ],
            SystemKind::DoublePendulum => &[
                ("theta1", Jitter::Relative),
                ("theta2", Jitter::Relative),
                ("omega1", Jitter::Relative),
                ("omega2", Jitter::Relative),
            ],
        }
    }

    /// Seed-derived initial-state variation. With `init_jitter == 0` the
    /// spec is returned unchanged, byte for byte.
    pub fn effective(&self, seed: u64) -> SystemSpec {
        if self.init_jitter == 0.0 {
            return self.clone();
        }
        let j = self.init_jitter;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = self.clone();
        for (name, style) in self.jittered_params() {
            if let Some(v) = out.params.get_mut(*name) {
                match style {
                    Jitter::Relative => *v *= rng.gen_range(1.0 - j..=1.0 + j),
                    Jitter::AdditiveMeters => *v += rng.gen_range(-j..=j),
                    Jitter::PhaseRadians => *v += rng.gen_range(-j..=j) * std::f64::consts::PI,
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
enum Jitter {
    Relative,
    AdditiveMeters,
    PhaseRadians,
}

/// Generate the ground-truth trajectory (and analytic equations when the
/// system has them) for the seed-varied instance of `spec`.
pub fn generate(spec: &SystemSpec, seed: u64) -> Result<GroundTruth, DynamicsError> {
    spec.validate()?;
    let eff = spec.effective(seed);
    let ts = eff.t_grid();
    let map = eff.pixel_map;

    let (samples, analytic) = match eff.kind {
        SystemKind::SpringMass => {
            let (omega, amp, phase, cx, cy) = spring_params(&eff)?;
            let samples = ts
                .iter()
                .map(|&t| {
                    let x_m = cx + amp * (omega * t + phase).cos();
                    let (px, py) = map.apply(x_m, cy);
                    (t, px, py)
                })
                .collect();
            (samples, analytic_equation(&eff)?)
        }
        SystemKind::DampedSpringMass => {
            let (omega_d, gamma, amp, phase, cx, cy) = damped_params(&eff)?;
            let samples = ts
                .iter()
                .map(|&t| {
                    let x_m = cx + amp * (-gamma * t).exp() * (omega_d * t + phase).cos();
                    let (px, py) = map.apply(x_m, cy);
                    (t, px, py)
                })
                .collect();
            (samples, analytic_equation(&eff)?)
        }
        SystemKind::Projectile => {
            let x0 = eff.param("x0")?;
            let y0 = eff.param("y0")?;
            let vx = eff.param("vx")?;
            let vy = eff.param("vy")?;
            let g = eff.param("gravity")?;
            let samples = ts
                .iter()
                .map(|&t| {
                    let x_m = x0 + vx * t;
                    let y_m = y0 + vy * t - 0.5 * g * t * t;
                    let (px, py) = map.apply(x_m, y_m);
                    (t, px, py)
                })
                .collect();
            (samples, analytic_equation(&eff)?)
        }
        SystemKind::TwoBody => {
            let (radius, omega, phase, cx, cy) = two_body_params(&eff)?;
            let samples = ts
                .iter()
                .map(|&t| {
                    let x_m = cx + radius * (omega * t + phase).cos();
                    let y_m = cy + radius * (omega * t + phase).sin();
                    let (px, py) = map.apply(x_m, y_m);
                    (t, px, py)
                })
                .collect();
            (samples, analytic_equation(&eff)?)
        }
        SystemKind::SinglePendulum => {
            let length = eff.param("length")?;
            let g = eff.param("gravity")?;
            let theta0 = eff.param("theta0")?;
            let omega0 = eff.param("omega0")?;
            let h = 1.0 / (20.0 * eff.sample_rate);
            let states =
                integrate_single_pendulum(length, g, theta0, omega0, h, (ts.len() - 1) * 20);
            let energy: Vec<f64> = states
                .iter()
                .map(|&(th, om)| single_pendulum_energy(length, g, th, om))
                .collect();
            check_energy_drift(&energy, g * length)?;
            let samples = ts
                .iter()
                .enumerate()
                .map(|(i, &t)| {
                    let (theta, _) = states[i * 20];
                    let x_m = length * theta.sin();
                    let y_m = -length * theta.cos();
                    let (px, py) = map.apply(x_m, y_m);
                    (t, px, py)
                })
                .collect();
            (samples, None)
        }
        SystemKind::DoublePendulum => {
            let p = DoublePendulumParams::from_spec(&eff)?;
            let state0 = [
                eff.param("theta1")?,
                eff.param("omega1")?,
                eff.param("theta2")?,
                eff.param("omega2")?,
            ];
            let h = 1.0 / (20.0 * eff.sample_rate);
            let states = integrate_fixed(
                |s| p.derivatives(s),
                state0,
                h,
                (ts.len() - 1) * 20,
            );
            let energy: Vec<f64> = states.iter().map(|s| p.energy(s)).collect();
            check_energy_drift(&energy, (p.m1 + p.m2) * p.g * (p.l1 + p.l2))?;
            let samples = ts
                .iter()
                .enumerate()
                .map(|(i, &t)| {
                    let s = states[i * 20];
                    // the tracked point is the second bob
                    let x_m = p.l1 * s[0].sin() + p.l2 * s[2].sin();
                    let y_m = -p.l1 * s[0].cos() - p.l2 * s[2].cos();
                    let (px, py) = map.apply(x_m, y_m);
                    (t, px, py)
                })
                .collect();
            (samples, None)
        }
    };

    let trajectory = Trajectory::new(0, samples, eff.sample_rate);
    let (analytic_x, analytic_y) = match analytic {
        Some((x, y)) => (Some(x), Some(y)),
        None => (None, None),
    };
    Ok(GroundTruth {
        trajectory,
        analytic_x,
        analytic_y,
        effective_spec: eff,
    })
}

fn spring_params(spec: &SystemSpec) -> Result<(f64, f64, f64, f64, f64), DynamicsError> {
    let omega = (spec.param("spring_k")? / spec.param("mass")?).sqrt();
    Ok((
        omega,
        spec.param("amplitude")?,
        spec.param("phase")?,
        spec.param("center_x")?,
        spec.param("center_y")?,
    ))
}

fn damped_params(spec: &SystemSpec) -> Result<(f64, f64, f64, f64, f64, f64), DynamicsError> {
    let omega0_sq = spec.param("spring_k")? / spec.param("mass")?;
    let gamma = spec.param("damping")?;
    let omega_d = (omega0_sq - gamma * gamma).sqrt();
    Ok((
        omega_d,
        gamma,
        spec.param("amplitude")?,
        spec.param("phase")?,
        spec.param("center_x")?,
        spec.param("center_y")?,
    ))
}

fn two_body_params(spec: &SystemSpec) -> Result<(f64, f64, f64, f64, f64), DynamicsError> {
    let radius = spec.param("radius")?;
    let omega = (spec.param("grav_param")? / radius.powi(3)).sqrt();
    Ok((
        radius,
        omega,
        spec.param("phase")?,
        spec.param("center_x")?,
        spec.param("center_y")?,
    ))
}

/// Ground-truth `(x(t), y(t))` expressions in pixel coordinates with all
/// constants substituted; `None` for pendulum systems.
pub fn analytic_equation(spec: &SystemSpec) -> Result<Option<(Expr, Expr)>, DynamicsError> {
    let map = spec.pixel_map;
    let c = Expr::constant;
    let t = Expr::time;
    // A * cos(w t + phi) + offset, simplified to drop zero terms
    let sinusoid = |amp_px: f64, omega: f64, phase: f64, offset_px: f64, sin: bool| {
        let angle = Expr::add(Expr::mul(c(omega), t()), c(phase));
        let wave = if sin { Expr::sin(angle) } else { Expr::cos(angle) };
        Expr::add(Expr::mul(c(amp_px), wave), c(offset_px)).simplify()
    };
    let out = match spec.kind {
        SystemKind::SpringMass => {
            let (omega, amp, phase, cx, cy) = spring_params(spec)?;
            let x = sinusoid(
                map.scale * amp,
                omega,
                phase,
                map.scale * cx + map.offset.0,
                false,
            );
            let y = c(map.scale * cy + map.offset.1);
            Some((x, y))
        }
        SystemKind::DampedSpringMass => {
            let (omega_d, gamma, amp, phase, cx, cy) = damped_params(spec)?;
            let angle = Expr::add(Expr::mul(c(omega_d), t()), c(phase));
            let x = Expr::add(
                Expr::mul(
                    Expr::mul(
                        c(map.scale * amp),
                        Expr::exp(Expr::mul(c(-gamma), t())),
                    ),
                    Expr::cos(angle),
                ),
                c(map.scale * cx + map.offset.0),
            )
            .simplify();
            let y = c(map.scale * cy + map.offset.1);
            Some((x, y))
        }
        SystemKind::Projectile => {
            let x0 = spec.param("x0")?;
            let y0 = spec.param("y0")?;
            let vx = spec.param("vx")?;
            let vy = spec.param("vy")?;
            let g = spec.param("gravity")?;
            let x = Expr::add(
                c(map.scale * x0 + map.offset.0),
                Expr::mul(c(map.scale * vx), t()),
            )
            .simplify();
            let y = Expr::sub(
                Expr::add(
                    c(map.scale * y0 + map.offset.1),
                    Expr::mul(c(map.scale * vy), t()),
                ),
                Expr::mul(c(map.scale * 0.5 * g), Expr::pow(t(), c(2.0))),
            )
            .simplify();
            Some((x, y))
        }
        SystemKind::TwoBody => {
            let (radius, omega, phase, cx, cy) = two_body_params(spec)?;
            let x = sinusoid(
                map.scale * radius,
                omega,
                phase,
                map.scale * cx + map.offset.0,
                false,
            );
            let y = sinusoid(
                map.scale * radius,
                omega,
                phase,
                map.scale * cy + map.offset.1,
                true,
            );
            Some((x, y))
        }
        SystemKind::SinglePendulum | SystemKind::DoublePendulum => None,
    };
    Ok(out)
}

/// Add i.i.d. Gaussian pixel noise per coordinate. `sigma == 0` returns the
/// input unchanged, byte for byte.
pub fn add_noise(traj: &Trajectory, sigma: f64, seed: u64) -> Trajectory {
    assert!(sigma >= 0.0, "noise sigma must be non-negative");
    if sigma == 0.0 {
        return traj.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("valid sigma");
    let samples = traj
        .samples
        .iter()
        .map(|&(t, x, y)| (t, x + normal.sample(&mut rng), y + normal.sample(&mut rng)))
        .collect();
    Trajectory::new(traj.point_id, samples, traj.fps)
}

// ---------------------------------------------------------------------------
// RK4 integration

/// Classic fixed-step RK4 over an autonomous system. Returns `steps + 1`
/// states including the initial one.
pub fn integrate_fixed<const N: usize>(
    derivatives: impl Fn(&[f64; N]) -> [f64; N],
    state0: [f64; N],
    h: f64,
    steps: usize,
) -> Vec<[f64; N]> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = state0;
    out.push(y);
    for _ in 0..steps {
        let k1 = derivatives(&y);
        let k2 = derivatives(&add_scaled(&y, &k1, h / 2.0));
        let k3 = derivatives(&add_scaled(&y, &k2, h / 2.0));
        let k4 = derivatives(&add_scaled(&y, &k3, h));
        for i in 0..N {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out.push(y);
    }
    out
}

fn add_scaled<const N: usize>(y: &[f64; N], k: &[f64; N], s: f64) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += s * k[i];
    }
    out
}

/// RK4 states `(theta, omega)` of the full nonlinear single pendulum.
pub fn integrate_single_pendulum(
    length: f64,
    gravity: f64,
    theta0: f64,
    omega0: f64,
    h: f64,
    steps: usize,
) -> Vec<(f64, f64)> {
    let rhs = move |s: &[f64; 2]| [s[1], -(gravity / length) * s[0].sin()];
    integrate_fixed(rhs, [theta0, omega0], h, steps)
        .into_iter()
        .map(|s| (s[0], s[1]))
        .collect()
}

/// Mechanical energy per unit mass of a single pendulum state.
pub fn single_pendulum_energy(length: f64, gravity: f64, theta: f64, omega: f64) -> f64 {
    0.5 * length * length * omega * omega - gravity * length * theta.cos()
}

struct DoublePendulumParams {
    m1: f64,
    m2: f64,
    l1: f64,
    l2: f64,
    g: f64,
}

impl DoublePendulumParams {
    fn from_spec(spec: &SystemSpec) -> Result<DoublePendulumParams, DynamicsError> {
        Ok(DoublePendulumParams {
            m1: spec.param("m1")?,
            m2: spec.param("m2")?,
            l1: spec.param("l1")?,
            l2: spec.param("l2")?,
            g: spec.param("gravity")?,
        })
    }

    /// Lagrangian equations of motion; state is [th1, w1, th2, w2].
    fn derivatives(&self, s: &[f64; 4]) -> [f64; 4] {
        let (th1, w1, th2, w2) = (s[0], s[1], s[2], s[3]);
        let dlt = th1 - th2;
        let den = 2.0 * self.m1 + self.m2 - self.m2 * (2.0 * dlt).cos();
        let a1 = (-self.g * (2.0 * self.m1 + self.m2) * th1.sin()
            - self.m2 * self.g * (th1 - 2.0 * th2).sin()
            - 2.0 * dlt.sin()
                * self.m2
                * (w2 * w2 * self.l2 + w1 * w1 * self.l1 * dlt.cos()))
            / (self.l1 * den);
        let a2 = (2.0
            * dlt.sin()
            * (w1 * w1 * self.l1 * (self.m1 + self.m2)
                + self.g * (self.m1 + self.m2) * th1.cos()
                + w2 * w2 * self.l2 * self.m2 * dlt.cos()))
            / (self.l2 * den);
        [w1, a1, w2, a2]
    }

    fn energy(&self, s: &[f64; 4]) -> f64 {
        let (th1, w1, th2, w2) = (s[0], s[1], s[2], s[3]);
        let kinetic = 0.5 * self.m1 * self.l1 * self.l1 * w1 * w1
            + 0.5
                * self.m2
                * (self.l1 * self.l1 * w1 * w1
                    + self.l2 * self.l2 * w2 * w2
                    + 2.0 * self.l1 * self.l2 * w1 * w2 * (th1 - th2).cos());
        let potential = -self.g
            * ((self.m1 + self.m2) * self.l1 * th1.cos() + self.m2 * self.l2 * th2.cos());
        kinetic + potential
    }
}

fn check_energy_drift(energy: &[f64], characteristic: f64) -> Result<(), DynamicsError> {
    let e0 = energy[0];
    let denom = e0.abs().max(characteristic.abs()).max(f64::MIN_POSITIVE);
    let drift = energy
        .iter()
        .map(|e| (e - e0).abs())
        .fold(0.0f64, f64::max)
        / denom;
    if drift > 0.01 {
        return Err(DynamicsError::EnergyDrift {
            relative: drift * 100.0,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projectile_initial_sample_exact() {
        let mut spec = SystemSpec::with_defaults(SystemKind::Projectile);
        spec.pixel_map = PixelMap::identity();
        let gt = generate(&spec, 0).unwrap();
        let (t0, x0, y0) = gt.trajectory.samples[0];
        assert_eq!(t0, 0.0);
        assert_eq!(x0, spec.params["x0"]);
        assert_eq!(y0, spec.params["y0"]);
    }

    #[test]
    fn spring_mass_analytic_matches_spec_example() {
        let mut spec = SystemSpec::with_defaults(SystemKind::SpringMass);
        spec.params.insert("spring_k".into(), 4.0);
        spec.params.insert("mass".into(), 1.0);
        spec.params.insert("amplitude".into(), 2.0);
        spec.params.insert("phase".into(), 0.0);
        spec.params.insert("center_x".into(), 0.0);
        spec.params.insert("center_y".into(), 0.0);
        spec.pixel_map = PixelMap::identity();
        let (x, _y) = analytic_equation(&spec).unwrap().unwrap();
        assert_eq!(x.to_string(), "2 * cos(2 * t)");
    }

    #[test]
    fn projectile_analytic_matches_spec_example() {
        let mut spec = SystemSpec::with_defaults(SystemKind::Projectile);
        spec.params.insert("gravity".into(), 9.8);
        spec.params.insert("vy".into(), 0.0);
        spec.params.insert("y0".into(), 100.0);
        spec.pixel_map = PixelMap::identity();
        let (_x, y) = analytic_equation(&spec).unwrap().unwrap();
        assert_eq!(y.to_string(), "100 - 4.9 * t ^ 2");
    }

    #[test]
    fn double_pendulum_has_no_analytic_equation() {
        let spec = SystemSpec::with_defaults(SystemKind::DoublePendulum);
        assert!(analytic_equation(&spec).unwrap().is_none());
        let gt = generate(&spec, 0).unwrap();
        assert!(gt.analytic_x.is_none());
    }

    #[test]
    fn analytic_matches_trajectory_for_closed_forms() {
        for kind in [
            SystemKind::SpringMass,
            SystemKind::DampedSpringMass,
            SystemKind::Projectile,
            SystemKind::TwoBody,
        ] {
            let spec = SystemSpec::with_defaults(kind);
            let gt = generate(&spec, 3).unwrap();
            let ts = gt.trajectory.t_values();
            let fx = gt.analytic_x.as_ref().unwrap().evaluate_on(&ts, false);
            let fy = gt.analytic_y.as_ref().unwrap().evaluate_on(&ts, false);
            for (i, &(_, x, y)) in gt.trajectory.samples.iter().enumerate() {
                assert!(
                    (fx[i] - x).abs() < 1e-9 && (fy[i] - y).abs() < 1e-9,
                    "{}: analytic diverges from samples",
                    kind.name()
                );
            }
        }
    }

    #[test]
    fn small_angle_pendulum_matches_linearized_solution() {
        let length = 1.0;
        let g = 9.8;
        let theta0 = 0.05;
        let h = 1.0 / 400.0;
        let steps = 5 * 400;
        let states = integrate_single_pendulum(length, g, theta0, 0.0, h, steps);
        let omega = (g / length).sqrt();
        let max_err = states
            .iter()
            .enumerate()
            .map(|(i, &(theta, _))| {
                let t = i as f64 * h;
                (theta - theta0 * (omega * t).cos()).abs()
            })
            .fold(0.0f64, f64::max);
        assert!(max_err < 1e-3, "small-angle error {max_err}");
    }

    #[test]
    fn rk4_fourth_order_convergence() {
        // halving the step should cut the error ~16x against a fine reference
        let (length, g, theta0) = (1.0, 9.8, 1.0);
        let duration = 5.0;
        let err = |h: f64| -> f64 {
            let steps = (duration / h).round() as usize;
            let coarse = integrate_single_pendulum(length, g, theta0, 0.0, h, steps);
            let fine = integrate_single_pendulum(length, g, theta0, 0.0, h / 10.0, steps * 10);
            coarse
                .iter()
                .enumerate()
                .map(|(i, &(th, _))| (th - fine[i * 10].0).abs())
                .fold(0.0f64, f64::max)
        };
        let ratio = err(0.02) / err(0.01);
        assert!(
            (12.0..=20.0).contains(&ratio),
            "convergence ratio {ratio} outside [12, 20]"
        );
    }

    #[test]
    fn undamped_pendulum_energy_drift_small() {
        let (length, g, theta0) = (1.0, 9.8, 1.0);
        let h = 1.0 / 400.0;
        let states = integrate_single_pendulum(length, g, theta0, 0.0, h, 10 * 400);
        let e0 = single_pendulum_energy(length, g, theta0, 0.0);
        let drift = states
            .iter()
            .map(|&(th, om)| (single_pendulum_energy(length, g, th, om) - e0).abs())
            .fold(0.0f64, f64::max)
            / e0.abs();
        assert!(drift < 0.001, "energy drift {drift}");
    }

    #[test]
    fn undamped_spring_energy_constant() {
        let spec = SystemSpec::with_defaults(SystemKind::SpringMass);
        let (omega, amp, phase, cx, _) = spring_params(&spec).unwrap();
        let k = spec.params["spring_k"];
        let m = spec.params["mass"];
        let expected = 0.5 * k * amp * amp;
        // 10 periods
        let n = 400;
        for i in 0..=n {
            let t = 10.0 * (2.0 * std::f64::consts::PI / omega) * i as f64 / n as f64;
            let x = cx + amp * (omega * t + phase).cos() - cx;
            let v = -amp * omega * (omega * t + phase).sin();
            let e = 0.5 * k * x * x + 0.5 * m * v * v;
            assert!((e - expected).abs() / expected < 0.001);
        }
    }

    #[test]
    fn damped_envelope_extrema_decrease() {
        let mut spec = SystemSpec::with_defaults(SystemKind::DampedSpringMass);
        spec.duration = 8.0;
        spec.kind = SystemKind::DampedSpringMass;
        let gt = generate(&spec, 0).unwrap();
        let xs = gt.trajectory.xs();
        let center = spec.pixel_map.scale * spec.params["center_x"] + spec.pixel_map.offset.0;
        let dev: Vec<f64> = xs.iter().map(|x| (x - center).abs()).collect();
        let mut extrema = Vec::new();
        for i in 1..dev.len() - 1 {
            if dev[i] >= dev[i - 1] && dev[i] >= dev[i + 1] && dev[i] > 1e-6 {
                extrema.push(dev[i]);
            }
        }
        assert!(extrema.len() >= 3, "need several extrema");
        for w in extrema.windows(2) {
            assert!(w[1] < w[0], "envelope not decreasing: {w:?}");
        }
    }

    #[test]
    fn two_body_radius_constant() {
        let spec = SystemSpec::with_defaults(SystemKind::TwoBody);
        let gt = generate(&spec, 0).unwrap();
        let s = spec.pixel_map.scale;
        let (ox, oy) = spec.pixel_map.offset;
        let r_px = s * spec.params["radius"];
        for &(_, x, y) in &gt.trajectory.samples {
            let r = ((x - ox).powi(2) + (y - oy).powi(2)).sqrt();
            assert!((r - r_px).abs() / r_px < 1e-9);
        }
    }

    #[test]
    fn pixel_mapping_is_affine_exactly() {
        let mut unit = SystemSpec::with_defaults(SystemKind::SinglePendulum);
        unit.pixel_map = PixelMap::identity();
        let mut mapped = unit.clone();
        mapped.pixel_map = PixelMap {
            scale: 137.5,
            offset: (320.0, 240.0),
        };
        let a = generate(&unit, 0).unwrap().trajectory;
        let b = generate(&mapped, 0).unwrap().trajectory;
        for (sa, sb) in a.samples.iter().zip(&b.samples) {
            let x = 137.5 * sa.1 + 320.0;
            let y = 137.5 * sa.2 + 240.0;
            assert_eq!(x.to_bits(), sb.1.to_bits());
            assert_eq!(y.to_bits(), sb.2.to_bits());
        }
    }

    #[test]
    fn noise_sigma_zero_is_identity() {
        let spec = SystemSpec::with_defaults(SystemKind::SpringMass);
        let gt = generate(&spec, 0).unwrap();
        let noisy = add_noise(&gt.trajectory, 0.0, 42);
        assert_eq!(noisy, gt.trajectory);
    }

    #[test]
    fn noise_statistics_and_determinism() {
        let samples: Vec<(f64, f64, f64)> =
            (0..5000).map(|i| (i as f64 * 0.01, 100.0, 200.0)).collect();
        let traj = Trajectory::new(0, samples, 100.0);
        let a = add_noise(&traj, 1.0, 7);
        let b = add_noise(&traj, 1.0, 7);
        assert_eq!(a, b, "fixed seed must reproduce identical noise");
        let devs: Vec<f64> = a
            .samples
            .iter()
            .zip(&traj.samples)
            .flat_map(|(n, c)| [n.1 - c.1, n.2 - c.2])
            .collect();
        let n = devs.len() as f64;
        let mean = devs.iter().sum::<f64>() / n;
        let std = (devs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n).sqrt();
        assert!((0.97..=1.03).contains(&std), "noise std {std}");
    }

    #[test]
    fn jitter_varies_initial_state_per_seed() {
        let mut spec = SystemSpec::with_defaults(SystemKind::SpringMass);
        spec.init_jitter = 0.2;
        let a = spec.effective(1);
        let b = spec.effective(2);
        assert_ne!(a.params["amplitude"], b.params["amplitude"]);
        assert_eq!(spec.effective(1), a, "same seed must give same params");
        spec.init_jitter = 0.0;
        assert_eq!(spec.effective(5), spec);
    }

    #[test]
    fn validation_rejects_bad_specs() {
        let mut spec = SystemSpec::with_defaults(SystemKind::SpringMass);
        spec.duration = 0.0;
        assert!(spec.validate().is_err());
        let mut spec = SystemSpec::with_defaults(SystemKind::SpringMass);
        spec.params.insert("mass".into(), -1.0);
        assert!(spec.validate().is_err());
        let mut spec = SystemSpec::with_defaults(SystemKind::DampedSpringMass);
        spec.params.insert("damping".into(), 100.0);
        assert!(spec.validate().is_err());
        let mut spec = SystemSpec::with_defaults(SystemKind::DoublePendulum);
        spec.duration = 10.0;
        assert!(spec.validate().is_err());
    }
}
