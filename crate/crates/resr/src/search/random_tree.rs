//! Random expression generation (grow method).

use super::OperatorSet;
use crate::expr::{BinaryOp, Expr};
use rand::Rng;

/// Grow a random tree of depth at most `max_depth`. Constants are drawn
/// from U[-10, 10]; exponents of `^` are kept constant-only (mutations may
/// still move variables into exponents later).
pub fn random_tree(rng: &mut impl Rng, ops: &OperatorSet, max_depth: usize) -> Expr {
    if max_depth == 0 || rng.gen_bool(0.3) {
        return random_terminal(rng);
    }
    let n_unary = ops.unary.len();
    let n_binary = ops.binary.len();
    let pick = rng.gen_range(0..n_unary + n_binary);
    if pick < n_unary {
        Expr::unary(ops.unary[pick], random_tree(rng, ops, max_depth - 1))
    } else {
        let op = ops.binary[pick - n_unary];
        let lhs = random_tree(rng, ops, max_depth - 1);
        let rhs = if op == BinaryOp::Pow {
            random_exponent(rng)
        } else {
            random_tree(rng, ops, max_depth - 1)
        };
        Expr::binary(op, lhs, rhs)
    }
}

fn random_terminal(rng: &mut impl Rng) -> Expr {
    if rng.gen_bool(0.5) {
        Expr::time()
    } else {
        Expr::constant(rng.gen_range(-10.0..=10.0))
    }
}

// exponents mostly come from the handful of powers physics actually uses
const COMMON_EXPONENTS: [f64; 7] = [2.0, 3.0, 0.5, -1.0, -2.0, 4.0, -0.5];

fn random_exponent(rng: &mut impl Rng) -> Expr {
    if rng.gen_bool(0.8) {
        Expr::constant(COMMON_EXPONENTS[rng.gen_range(0..COMMON_EXPONENTS.len())])
    } else {
        Expr::constant(rng.gen_range(-3.0..=3.0))
    }
}
