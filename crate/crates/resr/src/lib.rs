//! Retrieval-enhanced symbolic regression for 2D motion trajectories.
//!
//! Given an observed trajectory of image-space `(x, y)` positions over
//! time, this crate discovers closed-form equations of motion `x(t)`,
//! `y(t)` by evolutionary search seeded from a bank of time-parameterized
//! physics equations, then forecasts future positions from the discovered
//! pair and exports them for downstream trajectory-guided consumers.
//!
//! The pieces, bottom up:
//!
//! - [`expr`]: expression trees over `t` — parsing, printing, protected
//!   evaluation, simplification, and tree edit distance.
//! - [`ingest`]: tracked-point CSV loading, temporal-variance ranking, and
//!   the 80/10/10 temporal split.
//! - [`dynamics`]: synthetic generators for the classical-mechanics test
//!   systems (closed-form where solutions exist, RK4 for pendulums).
//! - [`bank`]: the shipped equation bank and its TSV format.
//! - [`retrieval`]: normalized-DTW ranking of bank entries against an
//!   observed axis.
//! - [`search`]: the island-model evolutionary engine with retrieval
//!   seeding, constant fitting, and a complexity/accuracy Pareto front.
//! - [`pipeline`]: end-to-end discovery, forecasting, export, and the
//!   benchmark harness.
//!
//! The `examples/` directory walks through each capability; the `resr`
//! binary exposes the same flows as subcommands.

pub mod bank;
pub mod dynamics;
pub mod expr;
pub mod ingest;
pub mod pipeline;
pub mod retrieval;
pub mod search;
