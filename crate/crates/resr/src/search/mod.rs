//! Evolutionary symbolic regression with retrieval-seeded initialization:
//! island populations under steady-state tournament replacement, subtree
//! crossover and mutation, derivative-free constant fitting, and a shared
//! complexity/accuracy Pareto front.

mod constopt;
mod evolve;
mod pareto;
mod random_tree;
mod variation;

pub use constopt::optimize_constants;
pub use evolve::{evolve, initialize_population, EvolveOutcome};
pub use pareto::{front_to_tsv, ConvergenceLog, FrontEntry, IterationStats, ParetoFront};
pub use random_tree::random_tree;
pub use variation::{crossover, mutate};

use crate::expr::{BinaryOp, Expr, UnaryOp};
use serde::{Deserialize, Serialize};

/// Fitness assigned when a candidate predicts any non-finite value.
pub const PENALTY_SENTINEL: f64 = 1e12;

/// Operators available to random generation and mutation. `neg` stays a
/// grammar-level construct and is not part of the search space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorSet {
    pub unary: Vec<UnaryOp>,
    pub binary: Vec<BinaryOp>,
}

impl Default for OperatorSet {
    fn default() -> OperatorSet {
        OperatorSet {
            unary: vec![
                UnaryOp::Cos,
                UnaryOp::Sin,
                UnaryOp::Exp,
                UnaryOp::Log,
                UnaryOp::Tan,
                UnaryOp::Sqrt,
            ],
            binary: vec![
                BinaryOp::Add,
                BinaryOp::Sub,
                BinaryOp::Mul,
                BinaryOp::Div,
                BinaryOp::Pow,
            ],
        }
    }
}

impl OperatorSet {
    pub fn validate(&self) -> Result<(), String> {
        if self.unary.contains(&UnaryOp::Neg) {
            return Err("`neg` is not a search operator".into());
        }
        if self.unary.is_empty() && self.binary.is_empty() {
            return Err("operator set must not be empty".into());
        }
        Ok(())
    }
}

/// Relative weights of the mutation kinds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MutationWeights {
    pub replace_kind: f64,
    pub replace_subtree: f64,
    pub perturb_constant: f64,
    pub insert_unary: f64,
    pub delete_unary: f64,
    pub simplify: f64,
}

impl Default for MutationWeights {
    fn default() -> MutationWeights {
        MutationWeights {
            replace_kind: 2.0,
            replace_subtree: 1.5,
            perturb_constant: 3.0,
            insert_unary: 1.0,
            delete_unary: 1.0,
            simplify: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub n_iterations: usize,
    pub n_populations: usize,
    pub population_size: usize,
    /// Fraction of each initial population seeded from retrieval.
    pub alpha: f64,
    pub top_k_retrieval: usize,
    pub operators: OperatorSet,
    pub max_complexity: usize,
    pub parsimony: f64,
    pub tournament_size: usize,
    pub crossover_prob: f64,
    pub mutation_weights: MutationWeights,
    /// Full constant-fit budget: restarts x evaluations per restart.
    pub const_opt_restarts: usize,
    pub const_opt_evals: usize,
    /// Cheaper single-start budget applied to every offspring.
    pub offspring_fit_evals: usize,
    /// One-time budget for refitting retrieved seeds before the first
    /// fitness evaluation. Bank constants start far from observed pixel
    /// scales, so this leg gets more room than the steady-state refits.
    pub seed_refit_evals: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig {
            n_iterations: 100,
            n_populations: 30,
            population_size: 30,
            alpha: 0.75,
            top_k_retrieval: 10,
            operators: OperatorSet::default(),
            max_complexity: 30,
            parsimony: 1e-3,
            tournament_size: 5,
            crossover_prob: 0.7,
            mutation_weights: MutationWeights::default(),
            const_opt_restarts: 8,
            const_opt_evals: 100,
            offspring_fit_evals: 40,
            seed_refit_evals: 1000,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(format!("alpha {} outside [0, 1]", self.alpha));
        }
        if self.n_iterations == 0 || self.n_populations == 0 || self.population_size == 0 {
            return Err("iteration/population budgets must be positive".into());
        }
        if self.top_k_retrieval == 0 {
            return Err("top_k_retrieval must be positive".into());
        }
        if self.tournament_size == 0 {
            return Err("tournament size must be positive".into());
        }
        if self.max_complexity < 1 {
            return Err("max complexity must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.crossover_prob) {
            return Err("crossover probability outside [0, 1]".into());
        }
        self.operators.validate()
    }

    /// Seeded members per population: `round(alpha * population_size)`,
    /// ties to even (the documented 22-of-30 case at alpha = 0.75).
    pub fn seed_count(&self) -> usize {
        (self.alpha * self.population_size as f64).round_ties_even() as usize
    }
}

/// A scored population member.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub expr: Expr,
    pub train_mse: f64,
    pub complexity: usize,
    /// Iteration the candidate was created in (0 = initialization).
    pub age: usize,
}

impl Candidate {
    pub fn new(expr: Expr, train_mse: f64, age: usize) -> Candidate {
        let complexity = expr.complexity();
        Candidate {
            expr,
            train_mse,
            complexity,
            age,
        }
    }
}

/// Mean squared error of an expression over `(t, value)` points under
/// protected evaluation; any non-finite prediction (or a non-finite mean)
/// yields the penalty sentinel.
pub fn mse(expr: &Expr, series: &[(f64, f64)]) -> f64 {
    let mut acc = 0.0;
    for &(t, y) in series {
        let pred = expr.eval_at(t, true);
        if !pred.is_finite() {
            return PENALTY_SENTINEL;
        }
        let d = pred - y;
        acc += d * d;
    }
    let out = acc / series.len() as f64;
    if out.is_finite() {
        out
    } else {
        PENALTY_SENTINEL
    }
}

/// Spec fitness of a candidate: its train MSE (with the sentinel rule).
pub fn fitness(candidate: &Candidate, train: &[(f64, f64)]) -> f64 {
    mse(&candidate.expr, train)
}

/// Parsimony-adjusted score used for selection (lower is better).
pub fn selection_score(train_mse: f64, complexity: usize, parsimony: f64) -> f64 {
    train_mse * (1.0 + parsimony * complexity as f64)
}
