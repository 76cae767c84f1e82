//! End-to-end wiring: ingestion -> retrieval -> per-axis search ->
//! validation-based model selection -> forecasting -> export, plus the
//! benchmark harness over synthetic systems.

mod bench;
mod discover;
mod export;
mod forecast;

pub use bench::{run_benchmark, BenchCell, BenchConfig, BenchReport, BenchRunRecord};
pub use discover::{discover, DiscoverError, DiscoveryResult, DiscoveryResultFile, TedReport};
pub use export::{
    export_trajectory, render_export, resample_for_export, ExportFormat, ExportOptions,
};
pub use forecast::{forecast, Forecast, ForecastError};
