//! Constant folding and identity rewrites.
//!
//! Keeps populations compact without doing symbolic algebra: `u - u -> 0`
//! applies only to syntactically identical subtrees. Folding uses raw IEEE
//! evaluation and only fires when the result is finite, so protected-mode
//! semantics are preserved at every point where the original is finite.

use super::{BinaryOp, Expr, UnaryOp};

impl Expr {
    /// Simplified copy. Never increases node count; the result evaluates
    /// identically (within 1e-12 relative) at every finite point.
    pub fn simplify(&self) -> Expr {
        let mut current = simplify_once(self);
        // rules can cascade (e.g. folding exposes an identity one level up)
        loop {
            let next = simplify_once(&current);
            if next == current {
                return current;
            }
            current = next;
        }
    }
}

fn simplify_once(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) | Expr::Time => e.clone(),
        Expr::Unary(op, child) => {
            let c = simplify_once(child);
            if let Expr::Const(v) = c {
                let folded = Expr::unary(*op, Expr::Const(v));
                if let Expr::Unary(..) = folded {
                    // Neg folded by the constructor; fold the rest by evaluation
                    let v = folded.eval_at(0.0, false);
                    if v.is_finite() {
                        return Expr::constant(v);
                    }
                    return folded;
                }
                return folded;
            }
            if *op == UnaryOp::Neg {
                if let Expr::Unary(UnaryOp::Neg, inner) = &c {
                    return (**inner).clone();
                }
            }
            Expr::unary(*op, c)
        }
        Expr::Binary(op, lhs, rhs) => {
            let l = simplify_once(lhs);
            let r = simplify_once(rhs);
            if let (Expr::Const(_), Expr::Const(_)) = (&l, &r) {
                let folded = Expr::binary(*op, l.clone(), r.clone());
                let v = folded.eval_at(0.0, false);
                if v.is_finite() {
                    return Expr::constant(v);
                }
                return folded;
            }
            match op {
                BinaryOp::Add => {
                    if l == Expr::Const(0.0) {
                        return r;
                    }
                    if r == Expr::Const(0.0) {
                        return l;
                    }
                }
                BinaryOp::Sub => {
                    if r == Expr::Const(0.0) {
                        return l;
                    }
                    if l == r {
                        return Expr::Const(0.0);
                    }
                    if l == Expr::Const(0.0) {
                        return Expr::neg(r);
                    }
                }
                BinaryOp::Mul => {
                    if l == Expr::Const(0.0) || r == Expr::Const(0.0) {
                        return Expr::Const(0.0);
                    }
                    if l == Expr::Const(1.0) {
                        return r;
                    }
                    if r == Expr::Const(1.0) {
                        return l;
                    }
                }
                BinaryOp::Div => {
                    if r == Expr::Const(1.0) {
                        return l;
                    }
                }
                BinaryOp::Pow => {
                    if r == Expr::Const(1.0) {
                        return l;
                    }
                    if r == Expr::Const(0.0) {
                        return Expr::Const(1.0);
                    }
                }
            }
            Expr::binary(*op, l, r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn spec_identity_cases() {
        assert_eq!(Expr::add(Expr::time(), Expr::constant(0.0)).simplify(), Expr::Time);
        assert_eq!(
            Expr::mul(Expr::constant(2.0), Expr::constant(3.0)).simplify(),
            Expr::Const(6.0)
        );
        let e = parse("0 * cos(t) + t").unwrap();
        assert_eq!(e.simplify(), Expr::Time);
    }

    #[test]
    fn sub_identical_subtrees_only() {
        let e = parse("cos(t + 1) - cos(t + 1)").unwrap();
        assert_eq!(e.simplify(), Expr::Const(0.0));
        // cos(t+1) - cos(1+t) is NOT syntactically identical; stays put
        let e = parse("cos(t + 1) - cos(1 + t)").unwrap();
        assert_eq!(e.simplify().complexity(), e.complexity());
    }

    #[test]
    fn non_finite_folds_are_left_alone() {
        // log(0) is -inf in raw IEEE; must not fold into a constant
        let e = parse("log(0)").unwrap();
        let s = e.simplify();
        assert!(matches!(s, Expr::Unary(UnaryOp::Log, _)));
        let e = parse("1 / 0").unwrap();
        assert!(matches!(e.simplify(), Expr::Binary(BinaryOp::Div, _, _)));
    }

    #[test]
    fn complexity_never_increases() {
        for src in [
            "t + 0",
            "0 + t",
            "t * 1",
            "1 * t",
            "t * 0",
            "t - t",
            "t / 1",
            "t ^ 1",
            "t ^ 0",
            "--t",
            "0 - cos(t)",
            "2 * 3 + t",
            "sqrt(4) * t",
            "cos(0.5) + sin(t)",
        ] {
            let e = parse(src).unwrap();
            let s = e.simplify();
            assert!(
                s.complexity() <= e.complexity(),
                "simplify grew `{src}`: {} -> {}",
                e.complexity(),
                s.complexity()
            );
        }
    }

    #[test]
    fn semantics_preserved_on_finite_points() {
        let ts: Vec<f64> = (1..100).map(|i| i as f64 * 0.1).collect();
        for src in [
            "0 * cos(t) + t",
            "t * 1 + 0",
            "(t - t) + exp(0.5 * t)",
            "sqrt(4) * t + cos(0) * t ^ 1",
            "2 ^ 3 ^ 2 + t",
            "-(t - t) + log(t)",
        ] {
            let e = parse(src).unwrap();
            let s = e.simplify();
            for protected in [true, false] {
                let a = e.evaluate_on(&ts, protected);
                let b = s.evaluate_on(&ts, protected);
                for (x, y) in a.iter().zip(&b) {
                    if x.is_finite() {
                        assert!(
                            (x - y).abs() <= 1e-12 * (1.0 + x.abs()),
                            "`{src}` diverged: {x} vs {y}"
                        );
                    }
                }
            }
        }
    }
}
