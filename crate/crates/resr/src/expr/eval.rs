//! Pointwise expression evaluation.
//!
//! Two modes. Protected (the search default): `log` and `sqrt` operate on
//! absolute values, `log(0)` yields a large-negative sentinel, and any
//! non-finite intermediate collapses to a NaN marker confined to that time
//! point. Unprotected (final reporting / forecasting): raw IEEE semantics.

use super::{BinaryOp, Expr, UnaryOp};

/// Value of protected `log` at zero.
pub const LOG_ZERO_SENTINEL: f64 = -1e12;

/// An ordered grid of time points plus the protected-operators flag.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalContext {
    t_values: Vec<f64>,
    protected: bool,
}

impl EvalContext {
    /// Panics if `t_values` is empty or not strictly increasing.
    pub fn new(t_values: Vec<f64>, protected: bool) -> EvalContext {
        assert!(!t_values.is_empty(), "evaluation grid must be non-empty");
        assert!(
            t_values.windows(2).all(|w| w[0] < w[1]),
            "evaluation grid must be strictly increasing"
        );
        EvalContext {
            t_values,
            protected,
        }
    }

    pub fn protected(t_values: Vec<f64>) -> EvalContext {
        EvalContext::new(t_values, true)
    }

    pub fn unprotected(t_values: Vec<f64>) -> EvalContext {
        EvalContext::new(t_values, false)
    }

    pub fn t_values(&self) -> &[f64] {
        &self.t_values
    }

    pub fn is_protected(&self) -> bool {
        self.protected
    }
}

impl Expr {
    /// Evaluate at every point of the context grid, one output per `t`.
    pub fn evaluate(&self, ctx: &EvalContext) -> Vec<f64> {
        self.evaluate_on(ctx.t_values(), ctx.is_protected())
    }

    /// Evaluate on a raw slice of time points.
    pub fn evaluate_on(&self, t_values: &[f64], protected: bool) -> Vec<f64> {
        t_values.iter().map(|&t| self.eval_at(t, protected)).collect()
    }

    /// Evaluate at a single time point.
    pub fn eval_at(&self, t: f64, protected: bool) -> f64 {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Time => t,
            Expr::Unary(op, child) => {
                let x = child.eval_at(t, protected);
                if protected && x.is_nan() {
                    return f64::NAN;
                }
                match op {
                    UnaryOp::Neg => -x,
                    UnaryOp::Cos => x.cos(),
                    UnaryOp::Sin => x.sin(),
                    UnaryOp::Exp => x.exp(),
                    UnaryOp::Tan => x.tan(),
                    UnaryOp::Log => {
                        if protected {
                            if x == 0.0 {
                                LOG_ZERO_SENTINEL
                            } else {
                                x.abs().ln()
                            }
                        } else {
                            x.ln()
                        }
                    }
                    UnaryOp::Sqrt => {
                        if protected {
                            x.abs().sqrt()
                        } else {
                            x.sqrt()
                        }
                    }
                }
            }
            Expr::Binary(op, lhs, rhs) => {
                let a = lhs.eval_at(t, protected);
                let b = rhs.eval_at(t, protected);
                if protected && (a.is_nan() || b.is_nan()) {
                    return f64::NAN;
                }
                match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div => a / b,
                    BinaryOp::Pow => a.powf(b),
                }
            }
        };
        if protected && !v.is_finite() {
            f64::NAN
        } else {
            v
        }
    }
}
