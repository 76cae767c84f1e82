//! Shared test-only oracles, independent of the library's implementation
//! paths: a layered recursive-descent parser, a warping-path enumerator for
//! DTW, a mapping enumerator for tree edit distance, and a random tree
//! generator.

#![allow(dead_code)]

use rand::Rng;
use resr::expr::{BinaryOp, Expr, UnaryOp};

// ---------------------------------------------------------------------------
// Recursive-descent parser oracle (grammar written out level by level,
// unlike the library's precedence climber).

pub mod rd_parser {
    use resr::expr::{BinaryOp, Expr, UnaryOp};

    pub fn parse(text: &str) -> Result<Expr, String> {
        let toks = tokenize(text)?;
        let mut p = P { toks, pos: 0 };
        let e = p.sum()?;
        if p.pos != p.toks.len() {
            return Err(format!("trailing tokens at {}", p.pos));
        }
        Ok(e)
    }

    #[derive(Debug, Clone, PartialEq)]
    enum T {
        Num(f64),
        Id(String),
        Op(char),
    }

    fn tokenize(s: &str) -> Result<Vec<T>, String> {
        let mut out = Vec::new();
        let cs: Vec<char> = s.chars().collect();
        let mut i = 0;
        while i < cs.len() {
            let c = cs[i];
            if c.is_whitespace() {
                i += 1;
            } else if "+-*/^()".contains(c) {
                out.push(T::Op(c));
                i += 1;
            } else if c.is_ascii_digit() || c == '.' {
                let start = i;
                while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                    i += 1;
                }
                if i < cs.len() && (cs[i] == 'e' || cs[i] == 'E') {
                    let mut j = i + 1;
                    if j < cs.len() && (cs[j] == '+' || cs[j] == '-') {
                        j += 1;
                    }
                    if j < cs.len() && cs[j].is_ascii_digit() {
                        i = j;
                        while i < cs.len() && cs[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = cs[start..i].iter().collect();
                out.push(T::Num(text.parse().map_err(|e| format!("{e}"))?));
            } else if c.is_ascii_alphabetic() {
                let start = i;
                while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                    i += 1;
                }
                out.push(T::Id(cs[start..i].iter().collect()));
            } else {
                return Err(format!("bad char {c}"));
            }
        }
        Ok(out)
    }

    struct P {
        toks: Vec<T>,
        pos: usize,
    }

    impl P {
        fn peek(&self) -> Option<&T> {
            self.toks.get(self.pos)
        }

        fn bump(&mut self) -> Option<T> {
            let t = self.toks.get(self.pos).cloned();
            if t.is_some() {
                self.pos += 1;
            }
            t
        }

        // sum := product (('+'|'-') product)*
        fn sum(&mut self) -> Result<Expr, String> {
            let mut lhs = self.product()?;
            while let Some(T::Op(c @ ('+' | '-'))) = self.peek() {
                let op = if *c == '+' { BinaryOp::Add } else { BinaryOp::Sub };
                self.bump();
                let rhs = self.product()?;
                lhs = Expr::binary(op, lhs, rhs);
            }
            Ok(lhs)
        }

        // product := unary (('*'|'/') unary)*
        fn product(&mut self) -> Result<Expr, String> {
            let mut lhs = self.unary()?;
            while let Some(T::Op(c @ ('*' | '/'))) = self.peek() {
                let op = if *c == '*' { BinaryOp::Mul } else { BinaryOp::Div };
                self.bump();
                let rhs = self.unary()?;
                lhs = Expr::binary(op, lhs, rhs);
            }
            Ok(lhs)
        }

        // unary := '-' unary | power
        fn unary(&mut self) -> Result<Expr, String> {
            if let Some(T::Op('-')) = self.peek() {
                self.bump();
                let operand = self.unary()?;
                return Ok(Expr::neg(operand));
            }
            self.power()
        }

        // power := atom ('^' unary)?   (right-associative, binds above '-')
        fn power(&mut self) -> Result<Expr, String> {
            let base = self.atom()?;
            if let Some(T::Op('^')) = self.peek() {
                self.bump();
                // exponent may itself start with unary minus or another power
                let exp = self.exponent()?;
                return Ok(Expr::pow(base, exp));
            }
            Ok(base)
        }

        fn exponent(&mut self) -> Result<Expr, String> {
            if let Some(T::Op('-')) = self.peek() {
                self.bump();
                let operand = self.exponent()?;
                return Ok(Expr::neg(operand));
            }
            self.power()
        }

        fn atom(&mut self) -> Result<Expr, String> {
            match self.bump() {
                Some(T::Num(v)) => Ok(Expr::constant(v)),
                Some(T::Op('(')) => {
                    let e = self.sum()?;
                    match self.bump() {
                        Some(T::Op(')')) => Ok(e),
                        _ => Err("missing )".into()),
                    }
                }
                Some(T::Id(name)) => {
                    if name == "t" {
                        return Ok(Expr::time());
                    }
                    let op = match name.as_str() {
                        "cos" => UnaryOp::Cos,
                        "sin" => UnaryOp::Sin,
                        "exp" => UnaryOp::Exp,
                        "log" => UnaryOp::Log,
                        "tan" => UnaryOp::Tan,
                        "sqrt" => UnaryOp::Sqrt,
                        _ => return Err(format!("unknown identifier {name}")),
                    };
                    match self.bump() {
                        Some(T::Op('(')) => {}
                        _ => return Err(format!("{name} needs parens")),
                    }
                    let arg = self.sum()?;
                    match self.bump() {
                        Some(T::Op(')')) => Ok(Expr::unary(op, arg)),
                        _ => Err("missing )".into()),
                    }
                }
                other => Err(format!("unexpected {other:?}")),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Brute-force DTW oracle: enumerate every warping path.

pub fn dtw_brute_force(a: &[f64], b: &[f64]) -> f64 {
    fn go(a: &[f64], b: &[f64], i: usize, j: usize) -> f64 {
        let cost = (a[i] - b[j]).abs();
        if i == 0 && j == 0 {
            return cost;
        }
        let mut best = f64::INFINITY;
        if i > 0 {
            best = best.min(go(a, b, i - 1, j));
        }
        if j > 0 {
            best = best.min(go(a, b, i, j - 1));
        }
        if i > 0 && j > 0 {
            best = best.min(go(a, b, i - 1, j - 1));
        }
        cost + best
    }
    go(a, b, a.len() - 1, b.len() - 1)
}

// ---------------------------------------------------------------------------
// Tree edit distance oracle: enumerate all valid mappings. A mapping is a
// one-to-one node correspondence preserving both preorder and postorder
// ranks (equivalently ancestorship and sibling order); its cost is the
// number of label-changing pairs plus all unmapped nodes on both sides.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Const,
    Time,
    Un(UnaryOp),
    Bin(BinaryOp),
}

pub struct FlatNode {
    pub kind: NodeKind,
    pub pre: usize,
    pub post: usize,
}

pub fn flatten(e: &Expr) -> Vec<FlatNode> {
    fn walk(e: &Expr, pre_counter: &mut usize, post_counter: &mut usize, out: &mut Vec<(NodeKind, usize, usize)>) {
        let pre = *pre_counter;
        *pre_counter += 1;
        let kind = match e {
            Expr::Const(_) => NodeKind::Const,
            Expr::Time => NodeKind::Time,
            Expr::Unary(op, _) => NodeKind::Un(*op),
            Expr::Binary(op, _, _) => NodeKind::Bin(*op),
        };
        match e {
            Expr::Unary(_, c) => walk(c, pre_counter, post_counter, out),
            Expr::Binary(_, l, r) => {
                walk(l, pre_counter, post_counter, out);
                walk(r, pre_counter, post_counter, out);
            }
            _ => {}
        }
        let post = *post_counter;
        *post_counter += 1;
        out.push((kind, pre, post));
    }
    let mut tmp = Vec::new();
    let (mut pre, mut post) = (0, 0);
    walk(e, &mut pre, &mut post, &mut tmp);
    tmp.sort_by_key(|n| n.1);
    tmp.into_iter()
        .map(|(kind, pre, post)| FlatNode { kind, pre, post })
        .collect()
}

pub fn ted_brute_force(a: &Expr, b: &Expr) -> usize {
    let na = flatten(a);
    let nb = flatten(b);
    let mut best = na.len() + nb.len();
    let mut used = vec![false; nb.len()];
    let mut pairs: Vec<(usize, usize)> = Vec::new();

    fn consistent(pairs: &[(usize, usize)], na: &[FlatNode], nb: &[FlatNode], i: usize, j: usize) -> bool {
        pairs.iter().all(|&(pi, pj)| {
            let pre_ok = (na[pi].pre < na[i].pre) == (nb[pj].pre < nb[j].pre);
            let post_ok = (na[pi].post < na[i].post) == (nb[pj].post < nb[j].post);
            pre_ok && post_ok
        })
    }

    fn cost(pairs: &[(usize, usize)], na: &[FlatNode], nb: &[FlatNode]) -> usize {
        let renames = pairs
            .iter()
            .filter(|&&(i, j)| na[i].kind != nb[j].kind)
            .count();
        (na.len() - pairs.len()) + (nb.len() - pairs.len()) + renames
    }

    fn search(
        idx: usize,
        na: &[FlatNode],
        nb: &[FlatNode],
        used: &mut Vec<bool>,
        pairs: &mut Vec<(usize, usize)>,
        best: &mut usize,
    ) {
        if idx == na.len() {
            *best = (*best).min(cost(pairs, na, nb));
            return;
        }
        // leave node idx unmapped
        search(idx + 1, na, nb, used, pairs, best);
        // or map it to any unused, order-consistent node of b
        for j in 0..nb.len() {
            if !used[j] && consistent(pairs, na, nb, idx, j) {
                used[j] = true;
                pairs.push((idx, j));
                search(idx + 1, na, nb, used, pairs, best);
                pairs.pop();
                used[j] = false;
            }
        }
    }

    search(0, &na, &nb, &mut used, &mut pairs, &mut best);
    best
}

// ---------------------------------------------------------------------------
// Random expression generator for property tests.

pub fn random_expr(rng: &mut impl Rng, max_depth: usize) -> Expr {
    if max_depth == 0 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.5) {
            Expr::time()
        } else {
            Expr::constant((rng.gen::<f64>() - 0.5) * 20.0)
        };
    }
    if rng.gen_bool(0.4) {
        let op = UnaryOp::ALL[rng.gen_range(0..UnaryOp::ALL.len())];
        Expr::unary(op, random_expr(rng, max_depth - 1))
    } else {
        let op = BinaryOp::ALL[rng.gen_range(0..BinaryOp::ALL.len())];
        Expr::binary(
            op,
            random_expr(rng, max_depth - 1),
            random_expr(rng, max_depth - 1),
        )
    }
}

/// Random expression with at most `max_nodes` nodes (rejection sampled).
pub fn random_small_expr(rng: &mut impl Rng, max_nodes: usize) -> Expr {
    loop {
        let e = random_expr(rng, 3);
        if e.complexity() <= max_nodes {
            return e;
        }
    }
}
