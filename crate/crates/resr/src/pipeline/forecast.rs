//! Forecast future positions from a discovery result.

use super::DiscoveryResult;
use crate::expr::Expr;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Future `(t, x, y)` samples continuing the observed grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forecast {
    pub samples: Vec<(f64, f64, f64)>,
    pub horizon: usize,
    /// Last observed time (the forecast starts one step after).
    pub t_start: f64,
    pub dt: f64,
}

#[derive(Debug, Error)]
pub enum ForecastError {
    #[error("forecast preconditions: steps >= 1 and dt > 0 (got {steps}, {dt})")]
    BadArgs { steps: usize, dt: f64 },
    #[error("non-finite {axis} forecast at t = {t}")]
    NonFinite { axis: char, t: f64 },
}

/// Evaluate the discovered pair at `t_last + i * dt` for `i = 1..=steps`,
/// with protected operators OFF: a non-finite value is an error naming the
/// first offending time, not silent data.
pub fn forecast(
    result: &DiscoveryResult,
    steps: usize,
    dt: Option<f64>,
) -> Result<Forecast, ForecastError> {
    forecast_exprs(&result.f_x, &result.f_y, result.t_last, steps, dt.unwrap_or(result.dt))
}

pub(crate) fn forecast_exprs(
    f_x: &Expr,
    f_y: &Expr,
    t_last: f64,
    steps: usize,
    dt: f64,
) -> Result<Forecast, ForecastError> {
    if steps < 1 || !(dt > 0.0) {
        return Err(ForecastError::BadArgs { steps, dt });
    }
    let mut samples = Vec::with_capacity(steps);
    for i in 1..=steps {
        let t = t_last + i as f64 * dt;
        let x = f_x.eval_at(t, false);
        if !x.is_finite() {
            return Err(ForecastError::NonFinite { axis: 'x', t });
        }
        let y = f_y.eval_at(t, false);
        if !y.is_finite() {
            return Err(ForecastError::NonFinite { axis: 'y', t });
        }
        samples.push((t, x, y));
    }
    Ok(Forecast {
        samples,
        horizon: steps,
        t_start: t_last,
        dt,
    })
}
