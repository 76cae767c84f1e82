//! Derivative-free constant fitting: Nelder-Mead simplex descent over the
//! constant vector of an expression, best of several perturbed restarts.

use super::{mse, PENALTY_SENTINEL};
use crate::expr::{BinaryOp, Expr};
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Constants eligible for numeric fitting. A literal in exponent position
/// (the direct right child of `^`) is structural — `t^2` and `t^0.35` are
/// different laws, not the same law with a different coefficient — so those
/// are left to the mutation operators instead of the simplex.
fn tunable_constants(e: &Expr) -> Vec<f64> {
    let mut out = Vec::new();
    collect_tunable(e, &mut out);
    out
}

fn collect_tunable(e: &Expr, out: &mut Vec<f64>) {
    match e {
        Expr::Const(c) => out.push(*c),
        Expr::Time => {}
        Expr::Unary(_, child) => collect_tunable(child, out),
        Expr::Binary(op, lhs, rhs) => {
            collect_tunable(lhs, out);
            if !(*op == BinaryOp::Pow && matches!(**rhs, Expr::Const(_))) {
                collect_tunable(rhs, out);
            }
        }
    }
}

fn with_tunable_constants(e: &Expr, values: &mut impl Iterator<Item = f64>) -> Expr {
    match e {
        Expr::Const(_) => Expr::constant(values.next().expect("enough values")),
        Expr::Time => Expr::Time,
        Expr::Unary(op, child) => {
            Expr::Unary(*op, Box::new(with_tunable_constants(child, values)))
        }
        Expr::Binary(op, lhs, rhs) => {
            let new_lhs = with_tunable_constants(lhs, values);
            let new_rhs = if *op == BinaryOp::Pow && matches!(**rhs, Expr::Const(_)) {
                (**rhs).clone()
            } else {
                with_tunable_constants(rhs, values)
            };
            Expr::Binary(*op, Box::new(new_lhs), Box::new(new_rhs))
        }
    }
}

/// Fit the constants of `expr` against `(t, y)` training points. Runs
/// `restarts` Nelder-Mead descents (the first from the current constants,
/// the rest from perturbed copies) with `max_evals` objective evaluations
/// each, and returns the best expression found together with its train MSE.
/// Never returns something worse than the input; an expression without
/// constants is returned unchanged.
pub fn optimize_constants(
    expr: &Expr,
    train: &[(f64, f64)],
    restarts: usize,
    max_evals: usize,
    rng: &mut impl Rng,
) -> (Expr, f64) {
    let base_mse = mse(expr, train);
    let constants = tunable_constants(expr);
    if constants.is_empty() || restarts == 0 || max_evals == 0 {
        return (expr.clone(), base_mse);
    }

    let objective = |theta: &[f64]| -> f64 {
        if theta.iter().any(|v| !v.is_finite()) {
            return PENALTY_SENTINEL;
        }
        mse(&with_tunable_constants(expr, &mut theta.iter().copied()), train)
    };

    let mut best_theta = constants.clone();
    let mut best_mse = base_mse;
    let normal = Normal::new(0.0, 0.5).expect("valid sigma");
    for restart in 0..restarts {
        let start: Vec<f64> = if restart == 0 {
            constants.clone()
        } else {
            constants
                .iter()
                .map(|&c| {
                    let scale: f64 = normal.sample(rng);
                    let shift: f64 = normal.sample(rng);
                    let v = c * scale.exp() + 0.1 * shift;
                    if v.is_finite() {
                        v
                    } else {
                        c
                    }
                })
                .collect()
        };
        let (theta, value) = nelder_mead(&objective, &start, max_evals);
        if value < best_mse && theta.iter().all(|v| v.is_finite()) {
            best_mse = value;
            best_theta = theta;
        }
    }

    if best_mse < base_mse {
        (
            with_tunable_constants(expr, &mut best_theta.iter().copied()),
            best_mse,
        )
    } else {
        (expr.clone(), base_mse)
    }
}

/// Standard Nelder-Mead (reflection 1, expansion 2, contraction 0.5,
/// shrink 0.5) with an evaluation budget and a flatness stop.
fn nelder_mead(
    objective: &impl Fn(&[f64]) -> f64,
    start: &[f64],
    max_evals: usize,
) -> (Vec<f64>, f64) {
    let dim = start.len();
    let mut evals = 0usize;
    let eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        objective(x)
    };

    // initial simplex: the start plus one orthogonal step per dimension
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let f0 = eval(start, &mut evals);
    simplex.push((start.to_vec(), f0));
    for i in 0..dim {
        let mut p = start.to_vec();
        p[i] += 0.1 * p[i].abs().max(1.0);
        let f = eval(&p, &mut evals);
        simplex.push((p, f));
    }

    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        if (worst - best).abs() <= 1e-14 * (1.0 + best.abs()) {
            break;
        }

        // centroid of all but the worst
        let mut centroid = vec![0.0; dim];
        for (p, _) in simplex.iter().take(dim) {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / dim as f64;
            }
        }
        let worst_point = simplex[dim].0.clone();
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&worst_point)
            .map(|(c, w)| c + (c - w))
            .collect();
        let f_reflect = eval(&reflect, &mut evals);

        if f_reflect < simplex[0].1 {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&worst_point)
                .map(|(c, w)| c + 2.0 * (c - w))
                .collect();
            let f_expand = eval(&expand, &mut evals);
            simplex[dim] = if f_expand < f_reflect {
                (expand, f_expand)
            } else {
                (reflect, f_reflect)
            };
        } else if f_reflect < simplex[dim - 1].1 {
            simplex[dim] = (reflect, f_reflect);
        } else {
            let contract: Vec<f64> = centroid
                .iter()
                .zip(&worst_point)
                .map(|(c, w)| c + 0.5 * (w - c))
                .collect();
            let f_contract = eval(&contract, &mut evals);
            if f_contract < simplex[dim].1 {
                simplex[dim] = (contract, f_contract);
            } else {
                // shrink toward the best vertex
                let best_point = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    for (v, b) in entry.0.iter_mut().zip(&best_point) {
                        *v = b + 0.5 * (*v - b);
                    }
                    entry.1 = eval(&entry.0.clone(), &mut evals);
                    if evals >= max_evals {
                        break;
                    }
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let best = simplex.swap_remove(0);
    (best.0, best.1)
}
