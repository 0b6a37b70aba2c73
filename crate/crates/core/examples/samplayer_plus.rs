//! The degree-revealing sampler next to its walk analogue MH+, both billed
//! with the cache on.
//!
//! ```bash
//! cargo run --release -p samplayer --example samplayer_plus -- 100000 5000 1000
//! ```

use samplayer::config::ExperimentConfig;
use samplayer::experiments::run_amortized_qc;
use samplayer::generators::{forest_fire, ForestFireParams};

fn arg(i: usize, default: usize) -> usize {
    std::env::args()
        .nth(i)
        .map(|s| s.parse().expect("integer argument"))
        .unwrap_or(default)
}

fn main() -> samplayer::Result<()> {
    let (n, l0, samples) = (arg(1, 20_000), arg(2, 1000), arg(3, 200));
    let graph = forest_fire(&ForestFireParams::new(n, 0.37, 0.3, 1))?;
    for algorithm in ["samplayer+", "mh+", "samplayer", "rej"] {
        let text = format!("graph=forest-fire\nn={n}\nalgorithm={algorithm}\nl0={l0}\nsamples={samples}\n");
        let cfg = ExperimentConfig::with_overrides(&text, &[])?;
        let out = run_amortized_qc(&cfg, &graph)?;
        let interval = out.interval.map_or("-".to_string(), |t| t.to_string());
        println!(
            "{algorithm:>11}: interval={interval:>4} preprocessing={:>6} total={:>7} amortized q/s={:.2}",
            out.preprocessing_queries,
            out.session_queries,
            out.final_amortized()
        );
    }
    Ok(())
}
