//! Contract tests for the expression core: golden-corpus round trips, the
//! independent recursive-descent parser oracle, tree-edit-distance oracle
//! equivalence and metric axioms, and property tests over random trees.

mod common;

use common::{rd_parser, random_expr, random_small_expr, ted_brute_force};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use resr::expr::{
    normalized_ted_similarity, parse, tree_edit_distance, EvalContext, Expr,
};

const GOLDEN: &str = include_str!("golden/expr_roundtrip.txt");

fn golden_lines() -> impl Iterator<Item = &'static str> {
    GOLDEN.lines().map(str::trim).filter(|l| !l.is_empty())
}

#[test]
fn golden_corpus_roundtrips() {
    let mut n = 0;
    for line in golden_lines() {
        let e = parse(line).unwrap_or_else(|err| panic!("parse `{line}` failed: {err}"));
        let printed = e.to_string();
        let back = parse(&printed)
            .unwrap_or_else(|err| panic!("reparse of printed `{printed}` failed: {err}"));
        assert_eq!(back, e, "round trip changed `{line}` -> `{printed}`");
        n += 1;
    }
    assert_eq!(n, 20, "golden corpus must hold 20 expressions");
}

#[test]
fn golden_corpus_matches_recursive_descent_oracle() {
    for line in golden_lines() {
        let main = parse(line).unwrap();
        let oracle = rd_parser::parse(line)
            .unwrap_or_else(|err| panic!("oracle rejected `{line}`: {err}"));
        assert_eq!(main, oracle, "parsers disagree on `{line}`");
    }
}

#[test]
fn pow_tower_evaluates_like_oracle() {
    let e = parse("2^3^2").unwrap();
    let o = rd_parser::parse("2^3^2").unwrap();
    assert_eq!(e, o);
    assert_eq!(e.eval_at(0.0, false), 512.0);
}

#[test]
fn ted_equals_brute_force_on_small_trees() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..250 {
        let a = random_small_expr(&mut rng, 6);
        let b = random_small_expr(&mut rng, 6);
        let fast = tree_edit_distance(&a, &b);
        let brute = ted_brute_force(&a, &b);
        assert_eq!(fast, brute, "TED mismatch for `{a}` vs `{b}`");
    }
}

#[test]
fn ted_metric_axioms_on_random_pairs() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..200 {
        let a = random_small_expr(&mut rng, 8);
        let b = random_small_expr(&mut rng, 8);
        let c = random_small_expr(&mut rng, 8);
        assert_eq!(tree_edit_distance(&a, &a), 0);
        assert_eq!(tree_edit_distance(&a, &b), tree_edit_distance(&b, &a));
        let ab = tree_edit_distance(&a, &b);
        let bc = tree_edit_distance(&b, &c);
        let ac = tree_edit_distance(&a, &c);
        assert!(ac <= ab + bc, "triangle violated: {ac} > {ab} + {bc}");
    }
}

#[test]
fn ted_similarity_bounds() {
    let mut rng = StdRng::seed_from_u64(13);
    for _ in 0..200 {
        let a = random_small_expr(&mut rng, 8);
        let b = random_small_expr(&mut rng, 8);
        let s = normalized_ted_similarity(&a, &b);
        assert!((0.0..=1.0).contains(&s));
    }
}

#[test]
fn simplify_preserves_semantics_on_random_trees() {
    let mut rng = StdRng::seed_from_u64(17);
    let ts: Vec<f64> = (1..50).map(|i| i as f64 * 0.13).collect();
    for _ in 0..300 {
        let e = random_expr(&mut rng, 5);
        let s = e.simplify();
        assert!(s.complexity() <= e.complexity());
        for protected in [true, false] {
            let a = e.evaluate_on(&ts, protected);
            let b = s.evaluate_on(&ts, protected);
            for (x, y) in a.iter().zip(&b) {
                if x.is_finite() {
                    assert!(
                        (x - y).abs() <= 1e-12 * (1.0 + x.abs()),
                        "simplify changed `{e}` -> `{s}` at protected={protected}: {x} vs {y}"
                    );
                }
            }
        }
    }
}

#[test]
fn evaluation_is_deterministic() {
    let mut rng = StdRng::seed_from_u64(23);
    let ts: Vec<f64> = (0..64).map(|i| i as f64 * 0.1).collect();
    for _ in 0..50 {
        let e = random_expr(&mut rng, 6);
        let ctx = EvalContext::protected(ts.clone());
        let a: Vec<u64> = e.evaluate(&ctx).iter().map(|v| v.to_bits()).collect();
        let b: Vec<u64> = e.evaluate(&ctx).iter().map(|v| v.to_bits()).collect();
        assert_eq!(a, b);
    }
}

// Strategy for structurally arbitrary trees up to depth 8.
fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::time()),
        prop::num::f64::NORMAL
            .prop_filter("finite", |v| v.is_finite())
            .prop_map(Expr::constant),
        prop::num::f64::SUBNORMAL.prop_map(Expr::constant),
        Just(Expr::constant(0.0)),
        Just(Expr::constant(-0.0)),
    ];
    leaf.prop_recursive(8, 128, 4, |inner| {
        prop_oneof![
            (0usize..7, inner.clone()).prop_map(|(i, c)| Expr::unary(
                resr::expr::UnaryOp::ALL[i],
                c
            )),
            (0usize..5, inner.clone(), inner).prop_map(|(i, l, r)| Expr::binary(
                resr::expr::BinaryOp::ALL[i],
                l,
                r
            )),
        ]
    })
}

proptest! {
    #[test]
    fn roundtrip_parse_print(e in arb_expr()) {
        let printed = e.to_string();
        let back = parse(&printed)
            .unwrap_or_else(|err| panic!("reparse of `{printed}` failed: {err}"));
        prop_assert_eq!(back, e);
    }

    #[test]
    fn complexity_positive_and_simplify_monotone(e in arb_expr()) {
        prop_assert!(e.complexity() >= 1);
        prop_assert!(e.simplify().complexity() <= e.complexity());
    }
}
