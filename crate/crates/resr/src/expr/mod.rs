//! Expression trees over the time variable `t`.
//!
//! An [`Expr`] is the unit of search, storage, and evaluation: a tree of
//! constants, the variable `t`, unary operators (`cos`, `sin`, `exp`, `log`,
//! `tan`, `sqrt`, negation) and binary operators (`+`, `-`, `*`, `/`, `^`).
//! Trees are immutable after construction; every operation on them is pure.

mod eval;
mod parse;
mod print;
mod simplify;
mod ted;

pub use eval::{EvalContext, LOG_ZERO_SENTINEL};
pub use parse::{parse, ParseError};
pub use ted::{
    commutative_canonical, normalized_ted_similarity, normalized_ted_similarity_canonical,
    tree_edit_distance, tree_edit_distance_canonical,
};

use serde::{Deserialize, Serialize};

/// Unary operators. `Neg` is produced by the parser for unary minus on
/// non-literal operands; negation of a literal folds into the constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnaryOp {
    Neg,
    Cos,
    Sin,
    Exp,
    Log,
    Tan,
    Sqrt,
}

impl UnaryOp {
    pub const ALL: [UnaryOp; 7] = [
        UnaryOp::Neg,
        UnaryOp::Cos,
        UnaryOp::Sin,
        UnaryOp::Exp,
        UnaryOp::Log,
        UnaryOp::Tan,
        UnaryOp::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "neg",
            UnaryOp::Cos => "cos",
            UnaryOp::Sin => "sin",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Tan => "tan",
            UnaryOp::Sqrt => "sqrt",
        }
    }
}

/// Binary operators with standard precedence; `^` is right-associative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 5] = [
        BinaryOp::Add,
        BinaryOp::Sub,
        BinaryOp::Mul,
        BinaryOp::Div,
        BinaryOp::Pow,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Pow => "^",
        }
    }
}

/// A symbolic expression tree over the single variable `t`.
///
/// Invariants, enforced by the constructors:
/// - constants are finite (never NaN or infinite);
/// - `Neg` never directly wraps a constant (it folds into the literal, so
///   printing and re-parsing reproduce the identical tree).
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Time,
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    /// A finite constant. Panics on NaN or infinite input: non-finite
    /// constants are unrepresentable by contract.
    pub fn constant(value: f64) -> Expr {
        assert!(value.is_finite(), "expression constants must be finite, got {value}");
        Expr::Const(value)
    }

    /// The time variable `t`.
    pub fn time() -> Expr {
        Expr::Time
    }

    pub fn unary(op: UnaryOp, child: Expr) -> Expr {
        if op == UnaryOp::Neg {
            if let Expr::Const(c) = child {
                return Expr::Const(-c);
            }
        }
        Expr::Unary(op, Box::new(child))
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn neg(child: Expr) -> Expr {
        Expr::unary(UnaryOp::Neg, child)
    }

    pub fn add(lhs: Expr, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Add, lhs, rhs)
    }

    pub fn sub(lhs: Expr, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Sub, lhs, rhs)
    }

    pub fn mul(lhs: Expr, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Mul, lhs, rhs)
    }

    pub fn div(lhs: Expr, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Div, lhs, rhs)
    }

    pub fn pow(lhs: Expr, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Pow, lhs, rhs)
    }

    pub fn cos(child: Expr) -> Expr {
        Expr::unary(UnaryOp::Cos, child)
    }

    pub fn sin(child: Expr) -> Expr {
        Expr::unary(UnaryOp::Sin, child)
    }

    pub fn exp(child: Expr) -> Expr {
        Expr::unary(UnaryOp::Exp, child)
    }

    pub fn log(child: Expr) -> Expr {
        Expr::unary(UnaryOp::Log, child)
    }

    pub fn tan(child: Expr) -> Expr {
        Expr::unary(UnaryOp::Tan, child)
    }

    pub fn sqrt(child: Expr) -> Expr {
        Expr::unary(UnaryOp::Sqrt, child)
    }

    /// Total node count of the tree. Always at least 1.
    pub fn complexity(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Time => 1,
            Expr::Unary(_, c) => 1 + c.complexity(),
            Expr::Binary(_, l, r) => 1 + l.complexity() + r.complexity(),
        }
    }

    /// True if `t` occurs anywhere in the tree.
    pub fn contains_time(&self) -> bool {
        match self {
            Expr::Time => true,
            Expr::Const(_) => false,
            Expr::Unary(_, c) => c.contains_time(),
            Expr::Binary(_, l, r) => l.contains_time() || r.contains_time(),
        }
    }

    /// Borrow the subtree rooted at preorder index `idx` (root is 0).
    pub fn subtree(&self, idx: usize) -> Option<&Expr> {
        if idx == 0 {
            return Some(self);
        }
        match self {
            Expr::Const(_) | Expr::Time => None,
            Expr::Unary(_, c) => c.subtree(idx - 1),
            Expr::Binary(_, l, r) => {
                let ln = l.complexity();
                if idx - 1 < ln {
                    l.subtree(idx - 1)
                } else {
                    r.subtree(idx - 1 - ln)
                }
            }
        }
    }

    /// Clone with the subtree at preorder index `idx` replaced.
    pub fn with_subtree(&self, idx: usize, replacement: Expr) -> Expr {
        if idx == 0 {
            return replacement;
        }
        match self {
            Expr::Const(_) | Expr::Time => self.clone(),
            Expr::Unary(op, c) => Expr::unary(*op, c.with_subtree(idx - 1, replacement)),
            Expr::Binary(op, l, r) => {
                let ln = l.complexity();
                if idx - 1 < ln {
                    Expr::binary(*op, l.with_subtree(idx - 1, replacement), (**r).clone())
                } else {
                    Expr::binary(*op, (**l).clone(), r.with_subtree(idx - 1 - ln, replacement))
                }
            }
        }
    }

    /// Constant values in preorder.
    pub fn constants(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_constants(&mut out);
        out
    }

    fn collect_constants(&self, out: &mut Vec<f64>) {
        match self {
            Expr::Const(c) => out.push(*c),
            Expr::Time => {}
            Expr::Unary(_, c) => c.collect_constants(out),
            Expr::Binary(_, l, r) => {
                l.collect_constants(out);
                r.collect_constants(out);
            }
        }
    }

    /// Clone with constant values replaced in preorder. `values` must have
    /// exactly as many elements as the tree has constant nodes, all finite.
    pub fn with_constants(&self, values: &[f64]) -> Expr {
        let mut iter = values.iter().copied();
        let out = self.substitute_constants(&mut iter);
        assert!(iter.next().is_none(), "too many constant values supplied");
        out
    }

    fn substitute_constants(&self, values: &mut impl Iterator<Item = f64>) -> Expr {
        match self {
            Expr::Const(_) => {
                let v = values.next().expect("too few constant values supplied");
                Expr::constant(v)
            }
            Expr::Time => Expr::Time,
            Expr::Unary(op, c) => Expr::Unary(*op, Box::new(c.substitute_constants(values))),
            Expr::Binary(op, l, r) => Expr::Binary(
                *op,
                Box::new(l.substitute_constants(values)),
                Box::new(r.substitute_constants(values)),
            ),
        }
    }
}
