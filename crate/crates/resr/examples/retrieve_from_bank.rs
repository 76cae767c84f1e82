//! Shape-based retrieval from the equation bank with normalized DTW,
//! including the constant-versus-cosine case that plain Euclidean distance
//! gets wrong: an observation from y = 0.5 cos(t+3) + 100 sits numerically
//! close to y = 100, but its shape matches cos(t).
//!
//! Run with: `cargo run --example retrieve_from_bank`

use resr::bank::{bank_stats, load_bank_str, load_default_bank};
use resr::retrieval::{retrieve_top_k, RetrievalQuery};

fn main() {
    let bank = load_default_bank().bank;
    println!("bank version {}:", bank.version);
    for (source, stats) in bank_stats(&bank) {
        println!(
            "  {source}: {} entries, mean length {:.1} nodes",
            stats.count, stats.mean_node_count
        );
    }

    // the worked two-entry example
    let tiny = load_bank_str(
        "# VERSION example\n\
         flat\taugmented\t100\tconstant level\n\
         wave\taugmented\tcos(t)\tunit cosine\n",
    )
    .expect("valid bank")
    .bank;
    let series: Vec<(f64, f64)> = (0..=80)
        .map(|i| {
            let t = i as f64 * 0.1;
            (t, 0.5 * (t + 3.0).cos() + 100.0)
        })
        .collect();
    let hits = retrieve_top_k(&RetrievalQuery::new(series.clone(), 2), &tiny)
        .expect("non-empty bank");
    println!("\nobserved y = 0.5 cos(t+3) + 100 against {{y=100, y=cos(t)}}:");
    for hit in &hits.hits {
        println!("  {}  distance {}", hit.id, hit.distance);
    }

    // same query against the full bank: oscillators with matching frequency
    // rank first regardless of their amplitude
    let hits = retrieve_top_k(&RetrievalQuery::new(series, 5), &bank).expect("non-empty bank");
    println!("\ntop 5 of the full bank:");
    for hit in &hits.hits {
        let expr = bank.get(&hit.id).map(|e| e.expr.to_string()).unwrap_or_default();
        println!("  {:30} {:8.3}  {expr}", hit.id, hit.distance);
    }
}
