//! Minimal-parenthesization infix printing.
//!
//! The printed string re-parses to a structurally identical tree. Negative
//! constants print as negative literals and are treated as unary-minus
//! precedence when deciding parentheses, so e.g. `(-2) ^ t` keeps its parens
//! while `2 * -3` drops them.

use super::{BinaryOp, Expr, UnaryOp};
use std::fmt;

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e {
        // covers -0.0, whose Display form carries the sign
        Expr::Const(c) if c.is_sign_negative() => PREC_NEG,
        Expr::Const(_) | Expr::Time => PREC_ATOM,
        Expr::Unary(UnaryOp::Neg, _) => PREC_NEG,
        Expr::Unary(_, _) => PREC_ATOM,
        Expr::Binary(BinaryOp::Add | BinaryOp::Sub, _, _) => PREC_ADD,
        Expr::Binary(BinaryOp::Mul | BinaryOp::Div, _, _) => PREC_MUL,
        Expr::Binary(BinaryOp::Pow, _, _) => PREC_POW,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Expr, needs_parens: bool) -> fmt::Result {
    if needs_parens {
        write!(f, "(")?;
        write!(f, "{child}")?;
        write!(f, ")")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Time => write!(f, "t"),
            Expr::Unary(UnaryOp::Neg, child) => {
                write!(f, "-")?;
                write_child(f, child, precedence(child) < PREC_NEG)
            }
            Expr::Unary(op, child) => write!(f, "{}({child})", op.name()),
            Expr::Binary(op, lhs, rhs) => {
                let prec = match op {
                    BinaryOp::Add | BinaryOp::Sub => PREC_ADD,
                    BinaryOp::Mul | BinaryOp::Div => PREC_MUL,
                    BinaryOp::Pow => PREC_POW,
                };
                // `^` is right-associative; the others are left-associative.
                // A unary minus directly right of an operator needs no parens.
                let (l_parens, r_parens) = if *op == BinaryOp::Pow {
                    (precedence(lhs) <= prec, precedence(rhs) < PREC_NEG)
                } else {
                    (precedence(lhs) < prec, precedence(rhs) <= prec)
                };
                write_child(f, lhs, l_parens)?;
                write!(f, " {} ", op.symbol())?;
                write_child(f, rhs, r_parens)
            }
        }
    }
}
