//! Mutation and crossover over expression trees. Oversize results are
//! retried up to five times, then the parent is returned unchanged.

use super::random_tree::random_tree;
use super::{MutationWeights, OperatorSet, SearchConfig};
use crate::expr::{BinaryOp, Expr, UnaryOp};
use rand::Rng;
use rand_distr::{Distribution, Normal};

const MAX_RETRIES: usize = 5;

/// One randomly chosen structural edit of `parent`.
pub fn mutate(parent: &Expr, config: &SearchConfig, rng: &mut impl Rng) -> Expr {
    for _ in 0..MAX_RETRIES {
        let child = mutate_once(parent, &config.operators, &config.mutation_weights, rng);
        if child.complexity() <= config.max_complexity {
            return child;
        }
    }
    parent.clone()
}

/// Replace a random subtree of `a` with a random subtree of `b`.
pub fn crossover(a: &Expr, b: &Expr, config: &SearchConfig, rng: &mut impl Rng) -> Expr {
    for _ in 0..MAX_RETRIES {
        let site = rng.gen_range(0..a.complexity());
        let donor_site = rng.gen_range(0..b.complexity());
        let donor = b.subtree(donor_site).expect("index in range").clone();
        let child = a.with_subtree(site, donor);
        if child.complexity() <= config.max_complexity {
            return child;
        }
    }
    a.clone()
}

#[derive(Clone, Copy)]
enum MutationKind {
    ReplaceKind,
    ReplaceSubtree,
    PerturbConstant,
    InsertUnary,
    DeleteUnary,
    Simplify,
}

fn pick_kind(weights: &MutationWeights, rng: &mut impl Rng) -> MutationKind {
    let table = [
        (MutationKind::ReplaceKind, weights.replace_kind),
        (MutationKind::ReplaceSubtree, weights.replace_subtree),
        (MutationKind::PerturbConstant, weights.perturb_constant),
        (MutationKind::InsertUnary, weights.insert_unary),
        (MutationKind::DeleteUnary, weights.delete_unary),
        (MutationKind::Simplify, weights.simplify),
    ];
    let total: f64 = table.iter().map(|(_, w)| w.max(0.0)).sum();
    let mut roll = rng.gen_range(0.0..total.max(f64::MIN_POSITIVE));
    for (kind, w) in table {
        let w = w.max(0.0);
        if roll < w {
            return kind;
        }
        roll -= w;
    }
    MutationKind::ReplaceKind
}

fn mutate_once(
    parent: &Expr,
    ops: &OperatorSet,
    weights: &MutationWeights,
    rng: &mut impl Rng,
) -> Expr {
    match pick_kind(weights, rng) {
        MutationKind::ReplaceKind => replace_kind(parent, ops, rng),
        MutationKind::ReplaceSubtree => {
            let site = rng.gen_range(0..parent.complexity());
            parent.with_subtree(site, random_tree(rng, ops, 3))
        }
        MutationKind::PerturbConstant => perturb_constant(parent, rng)
            .unwrap_or_else(|| replace_kind(parent, ops, rng)),
        MutationKind::InsertUnary => {
            if ops.unary.is_empty() {
                return replace_kind(parent, ops, rng);
            }
            let site = rng.gen_range(0..parent.complexity());
            let inner = parent.subtree(site).expect("index in range").clone();
            let op = ops.unary[rng.gen_range(0..ops.unary.len())];
            parent.with_subtree(site, Expr::unary(op, inner))
        }
        MutationKind::DeleteUnary => delete_unary(parent, rng)
            .unwrap_or_else(|| replace_kind(parent, ops, rng)),
        MutationKind::Simplify => parent.simplify(),
    }
}

/// Swap the kind of one node, preserving arity (terminal <-> terminal,
/// unary <-> unary, binary <-> binary).
fn replace_kind(parent: &Expr, ops: &OperatorSet, rng: &mut impl Rng) -> Expr {
    let site = rng.gen_range(0..parent.complexity());
    let node = parent.subtree(site).expect("index in range");
    let replacement = match node {
        Expr::Const(_) => Expr::time(),
        Expr::Time => Expr::constant(rng.gen_range(-10.0..=10.0)),
        Expr::Unary(current, child) => {
            let choices: Vec<UnaryOp> = ops
                .unary
                .iter()
                .copied()
                .filter(|op| op != current)
                .collect();
            if choices.is_empty() {
                return parent.clone();
            }
            Expr::unary(choices[rng.gen_range(0..choices.len())], (**child).clone())
        }
        Expr::Binary(current, lhs, rhs) => {
            let choices: Vec<BinaryOp> = ops
                .binary
                .iter()
                .copied()
                .filter(|op| op != current)
                .collect();
            if choices.is_empty() {
                return parent.clone();
            }
            Expr::binary(
                choices[rng.gen_range(0..choices.len())],
                (**lhs).clone(),
                (**rhs).clone(),
            )
        }
    };
    parent.with_subtree(site, replacement)
}

/// Multiplicative log-normal nudge of one constant; `None` if the tree has
/// no constants.
fn perturb_constant(parent: &Expr, rng: &mut impl Rng) -> Option<Expr> {
    let constants = parent.constants();
    if constants.is_empty() {
        return None;
    }
    let which = rng.gen_range(0..constants.len());
    let normal = Normal::new(0.0, 0.5).expect("valid sigma");
    let mut updated = constants.clone();
    let factor: f64 = normal.sample(rng);
    let next = updated[which] * factor.exp();
    updated[which] = if next.is_finite() { next } else { constants[which] };
    Some(parent.with_constants(&updated))
}

/// Splice out one unary node; `None` if the tree has no unary nodes.
fn delete_unary(parent: &Expr, rng: &mut impl Rng) -> Option<Expr> {
    let sites: Vec<usize> = (0..parent.complexity())
        .filter(|&i| matches!(parent.subtree(i), Some(Expr::Unary(..))))
        .collect();
    if sites.is_empty() {
        return None;
    }
    let site = sites[rng.gen_range(0..sites.len())];
    let Some(Expr::Unary(_, child)) = parent.subtree(site) else {
        unreachable!("site filtered to unary nodes");
    };
    Some(parent.with_subtree(site, (**child).clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn perturb_keeps_tree_shape() {
        let e = parse("2").unwrap();
        let mut rng = StdRng::seed_from_u64(5);
        let out = perturb_constant(&e, &mut rng).unwrap();
        assert_eq!(out.complexity(), 1);
        assert!(matches!(out, Expr::Const(c) if c != 2.0 && c.is_finite()));
    }

    #[test]
    fn delete_unary_unwraps() {
        let e = parse("cos(t)").unwrap();
        let mut rng = StdRng::seed_from_u64(6);
        assert_eq!(delete_unary(&e, &mut rng).unwrap(), Expr::Time);
        assert!(delete_unary(&Expr::time(), &mut rng).is_none());
    }

    #[test]
    fn mutation_respects_complexity_cap() {
        let config = SearchConfig {
            max_complexity: 12,
            ..SearchConfig::default()
        };
        let mut rng = StdRng::seed_from_u64(7);
        let mut current = parse("2 * cos(3 * t + 1) + 10").unwrap();
        for _ in 0..20_000 {
            current = mutate(&current, &config, &mut rng);
            assert!(current.complexity() <= config.max_complexity);
        }
    }

    #[test]
    fn crossover_of_tree_with_itself_is_valid() {
        let config = SearchConfig::default();
        let mut rng = StdRng::seed_from_u64(8);
        let a = parse("cos(t) + t ^ 2").unwrap();
        for _ in 0..1000 {
            let child = crossover(&a, &a, &config, &mut rng);
            assert!(child.complexity() <= config.max_complexity);
            // parse-print round trip still holds
            let printed = child.to_string();
            assert_eq!(parse(&printed).unwrap(), child);
        }
    }

    #[test]
    fn crossover_root_swap_outcomes() {
        let config = SearchConfig::default();
        let mut rng = StdRng::seed_from_u64(9);
        let a = parse("t").unwrap();
        let b = parse("cos(t)").unwrap();
        for _ in 0..100 {
            let child = crossover(&a, &b, &config, &mut rng);
            // the only site in `a` is the root, so the child is a subtree of b
            assert!(child == parse("cos(t)").unwrap() || child == Expr::Time);
        }
    }

    #[test]
    fn mutation_outputs_roundtrip() {
        let config = SearchConfig::default();
        let mut rng = StdRng::seed_from_u64(10);
        let mut current = parse("2 * cos(3 * t + 1) + 10").unwrap();
        for _ in 0..5000 {
            current = mutate(&current, &config, &mut rng);
            let printed = current.to_string();
            assert_eq!(parse(&printed).unwrap(), current, "round trip broke for {printed}");
        }
    }
}
