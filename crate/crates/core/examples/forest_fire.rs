//! Grow Forest Fire graphs and report size, density and the degree tail.
//!
//! ```bash
//! cargo run --release -p samplayer --example forest_fire -- 100000
//! ```

use std::time::Instant;

use samplayer::generators::{forest_fire, ForestFireParams};

fn main() -> samplayer::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("node count"))
        .unwrap_or(10_000);

    for seed in 1..=3 {
        let started = Instant::now();
        let g = forest_fire(&ForestFireParams::new(n, 0.37, 0.3, seed))?;
        let mut degrees: Vec<usize> = (0..g.node_count()).map(|v| g.degree(v)).collect();
        degrees.sort_unstable_by(|a, b| b.cmp(a));
        println!(
            "seed={seed} n={} m={} avg_degree={:.2} max_degree={} top1%_min_degree={} connected={} ({:.2?})",
            g.node_count(),
            g.edge_count(),
            g.average_degree(),
            degrees[0],
            degrees[n / 100],
            g.is_connected(),
            started.elapsed(),
        );
    }
    Ok(())
}
