//! Expression basics: parse an infix string, print it back, evaluate it on
//! a time grid (protected and raw), simplify, and compare tree structures
//! with the edit distance.
//!
//! Run with: `cargo run --example parse_and_evaluate`

use resr::expr::{
    normalized_ted_similarity, normalized_ted_similarity_canonical, parse, EvalContext,
};

fn main() {
    let e = parse("0.5 * cos(t + 3) + 100").expect("valid expression");
    println!("parsed:      {e}");
    println!("complexity:  {} nodes", e.complexity());

    let grid: Vec<f64> = (0..=5).map(|i| i as f64).collect();
    let values = e.evaluate(&EvalContext::protected(grid.clone()));
    println!("values:      {values:?}");

    // protected evaluation turns poles into per-point NaN markers instead
    // of poisoning the whole series
    let pole = parse("1 / t").expect("valid expression");
    let protected = pole.evaluate(&EvalContext::protected(vec![0.0, 1.0, 2.0]));
    let raw = pole.evaluate(&EvalContext::unprotected(vec![0.0, 1.0, 2.0]));
    println!("1/t protected: {protected:?}");
    println!("1/t raw IEEE:  {raw:?}");

    let clutter = parse("0 * cos(t) + (t - t) + 1 * t").expect("valid expression");
    println!("simplify:    {clutter}  ->  {}", clutter.simplify());

    // structure comparison ignores fitted constants entirely
    let a = parse("2 * cos(3 * t)").expect("valid");
    let b = parse("7.5 * cos(0.1 * t)").expect("valid");
    println!(
        "similarity({a}, {b}) = {}",
        normalized_ted_similarity(&a, &b)
    );
    let c = parse("100 + 2 * cos(3 * t)").expect("valid");
    let d = parse("2 * cos(3 * t) + 100").expect("valid");
    println!(
        "operand order: ordered = {}, canonical = {}",
        normalized_ted_similarity(&c, &d),
        normalized_ted_similarity_canonical(&c, &d)
    );
}
