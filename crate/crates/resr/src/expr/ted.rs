//! Ordered tree edit distance between expression trees.
//!
//! Zhang-Shasha dynamic program with unit insert/delete/substitute costs.
//! Node labels are operator kinds; every numeric constant shares the single
//! label `const`, so `A*cos(w*t)` and `2*cos(3*t)` are at distance 0 —
//! structure is compared, fitted constants are not.

use super::{BinaryOp, Expr, UnaryOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Label {
    Const,
    Time,
    Un(UnaryOp),
    Bin(BinaryOp),
}

fn label_rank(l: Label) -> u8 {
    match l {
        Label::Const => 0,
        Label::Time => 1,
        Label::Un(op) => 2 + op as u8,
        Label::Bin(op) => 9 + op as u8,
    }
}

/// Postorder-indexed tree: labels plus leftmost-leaf-descendant indices.
struct PostOrder {
    labels: Vec<Label>,
    // lld[i] = postorder index of the leftmost leaf under node i
    lld: Vec<usize>,
    keyroots: Vec<usize>,
}

impl PostOrder {
    fn build(e: &Expr) -> PostOrder {
        let mut labels = Vec::new();
        let mut lld = Vec::new();
        fn walk(e: &Expr, labels: &mut Vec<Label>, lld: &mut Vec<usize>) -> usize {
            match e {
                Expr::Const(_) => {
                    labels.push(Label::Const);
                    lld.push(labels.len() - 1);
                    labels.len() - 1
                }
                Expr::Time => {
                    labels.push(Label::Time);
                    lld.push(labels.len() - 1);
                    labels.len() - 1
                }
                Expr::Unary(op, c) => {
                    let child_ll = walk(c, labels, lld);
                    let child_lld = lld[child_ll];
                    labels.push(Label::Un(*op));
                    lld.push(child_lld);
                    labels.len() - 1
                }
                Expr::Binary(op, l, r) => {
                    let left_idx = walk(l, labels, lld);
                    let left_lld = lld[left_idx];
                    walk(r, labels, lld);
                    labels.push(Label::Bin(*op));
                    lld.push(left_lld);
                    labels.len() - 1
                }
            }
        }
        walk(e, &mut labels, &mut lld);
        let n = labels.len();
        // a keyroot is the highest node of each distinct leftmost path
        let mut keyroots = Vec::new();
        for i in 0..n {
            if !(i + 1..n).any(|j| lld[j] == lld[i]) {
                keyroots.push(i);
            }
        }
        PostOrder {
            labels,
            lld,
            keyroots,
        }
    }

    fn len(&self) -> usize {
        self.labels.len()
    }
}

/// Minimum ordered-tree edit script cost (unit costs, bucketed constants).
pub fn tree_edit_distance(a: &Expr, b: &Expr) -> usize {
    let t1 = PostOrder::build(a);
    let t2 = PostOrder::build(b);
    let (n, m) = (t1.len(), t2.len());
    let mut tree_dist = vec![vec![0usize; m]; n];
    let mut forest = vec![vec![0usize; m + 1]; n + 1];

    for &kr1 in &t1.keyroots {
        for &kr2 in &t2.keyroots {
            // forest distances over the subforests rooted along the
            // leftmost paths of kr1 and kr2, 1-based offsets from lld
            let l1 = t1.lld[kr1];
            let l2 = t2.lld[kr2];
            forest[0][0] = 0;
            for di in l1..=kr1 {
                forest[di - l1 + 1][0] = forest[di - l1][0] + 1;
            }
            for dj in l2..=kr2 {
                forest[0][dj - l2 + 1] = forest[0][dj - l2] + 1;
            }
            for di in l1..=kr1 {
                for dj in l2..=kr2 {
                    let fi = di - l1 + 1;
                    let fj = dj - l2 + 1;
                    let del = forest[fi - 1][fj] + 1;
                    let ins = forest[fi][fj - 1] + 1;
                    if t1.lld[di] == l1 && t2.lld[dj] == l2 {
                        let rename =
                            usize::from(t1.labels[di] != t2.labels[dj]);
                        let sub = forest[fi - 1][fj - 1] + rename;
                        let d = del.min(ins).min(sub);
                        forest[fi][fj] = d;
                        tree_dist[di][dj] = d;
                    } else {
                        // both prefixes are forests; substitute whole subtrees
                        let sub = forest[t1.lld[di] - l1][t2.lld[dj] - l2]
                            + tree_dist[di][dj];
                        forest[fi][fj] = del.min(ins).min(sub);
                    }
                }
            }
        }
    }
    tree_dist[n - 1][m - 1]
}

/// `1 - TED/max(node counts)`, clamped to `[0, 1]`.
pub fn normalized_ted_similarity(a: &Expr, b: &Expr) -> f64 {
    let d = tree_edit_distance(a, b) as f64;
    let denom = a.complexity().max(b.complexity()) as f64;
    (1.0 - d / denom).clamp(0.0, 1.0)
}

/// Reorder commutative (`+`, `*`) operands into a canonical order so that
/// operand order alone never counts as an edit. Compares subtrees by label
/// rank, then size, then children — constant values are ignored, matching
/// the bucketed TED labels.
pub fn commutative_canonical(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) | Expr::Time => e.clone(),
        Expr::Unary(op, c) => Expr::Unary(*op, Box::new(commutative_canonical(c))),
        Expr::Binary(op, l, r) => {
            let cl = commutative_canonical(l);
            let cr = commutative_canonical(r);
            if matches!(op, BinaryOp::Add | BinaryOp::Mul)
                && tree_order(&cr, &cl) == std::cmp::Ordering::Less
            {
                Expr::Binary(*op, Box::new(cr), Box::new(cl))
            } else {
                Expr::Binary(*op, Box::new(cl), Box::new(cr))
            }
        }
    }
}

fn node_label(e: &Expr) -> Label {
    match e {
        Expr::Const(_) => Label::Const,
        Expr::Time => Label::Time,
        Expr::Unary(op, _) => Label::Un(*op),
        Expr::Binary(op, _, _) => Label::Bin(*op),
    }
}

fn tree_order(a: &Expr, b: &Expr) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    let by_label = label_rank(node_label(a)).cmp(&label_rank(node_label(b)));
    if by_label != Ordering::Equal {
        return by_label;
    }
    let by_size = a.complexity().cmp(&b.complexity());
    if by_size != Ordering::Equal {
        return by_size;
    }
    match (a, b) {
        (Expr::Unary(_, ca), Expr::Unary(_, cb)) => tree_order(ca, cb),
        (Expr::Binary(_, la, ra), Expr::Binary(_, lb, rb)) => {
            let left = tree_order(la, lb);
            if left != Ordering::Equal {
                left
            } else {
                tree_order(ra, rb)
            }
        }
        _ => Ordering::Equal,
    }
}

/// Ordered TED, additionally minimized over canonical commutative orderings
/// of both trees.
pub fn tree_edit_distance_canonical(a: &Expr, b: &Expr) -> usize {
    let plain = tree_edit_distance(a, b);
    let canon = tree_edit_distance(&commutative_canonical(a), &commutative_canonical(b));
    plain.min(canon)
}

/// Similarity form of [`tree_edit_distance_canonical`].
pub fn normalized_ted_similarity_canonical(a: &Expr, b: &Expr) -> f64 {
    let d = tree_edit_distance_canonical(a, b) as f64;
    let denom = a.complexity().max(b.complexity()) as f64;
    (1.0 - d / denom).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn identical_trees_distance_zero() {
        let a = parse("cos(t)").unwrap();
        assert_eq!(tree_edit_distance(&a, &a), 0);
        assert_eq!(normalized_ted_similarity(&a, &a), 1.0);
    }

    #[test]
    fn insert_one_node() {
        let a = parse("t").unwrap();
        let b = parse("cos(t)").unwrap();
        assert_eq!(tree_edit_distance(&a, &b), 1);
        assert_eq!(normalized_ted_similarity(&a, &b), 0.5);
    }

    #[test]
    fn substitute_root() {
        let a = parse("t + 1").unwrap();
        let b = parse("t * 1").unwrap();
        assert_eq!(tree_edit_distance(&a, &b), 1);
    }

    #[test]
    fn disjoint_single_nodes() {
        let a = parse("2").unwrap();
        let b = parse("t").unwrap();
        assert_eq!(tree_edit_distance(&a, &b), 1);
        assert_eq!(normalized_ted_similarity(&a, &b), 0.0);
    }

    #[test]
    fn constants_share_one_label() {
        let a = parse("2 * cos(3 * t)").unwrap();
        let b = parse("7.5 * cos(0.1 * t)").unwrap();
        assert_eq!(tree_edit_distance(&a, &b), 0);
    }

    #[test]
    fn commutative_canonical_absorbs_operand_order() {
        let a = parse("100 + 2 * cos(t)").unwrap();
        let b = parse("2 * cos(t) + 100").unwrap();
        assert!(tree_edit_distance(&a, &b) > 0);
        assert_eq!(tree_edit_distance_canonical(&a, &b), 0);
        assert_eq!(normalized_ted_similarity_canonical(&a, &b), 1.0);
    }
}
