//! Accuracy of the periphery-size estimate across base-layer sizes: the full
//! preprocessing is repeated over seeds and compared with the exact size.
//!
//! ```bash
//! cargo run --release -p samplayer --example size_estimation -- 100000 1000,3000,10000
//! ```

use samplayer::exact::decompose;
use samplayer::generators::{forest_fire, ForestFireParams};
use samplayer::layering::SecondHop;
use samplayer::stats::median;
use samplayer::{preprocess, AccessSession, CountingMode, QueryModel, SamplerParams};

fn main() -> samplayer::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(20_000, |s| s.parse().expect("node count"));
    let grid: Vec<usize> = args
        .next()
        .unwrap_or_else(|| "200,400,800".into())
        .split(',')
        .map(|s| s.parse().expect("l0 list"))
        .collect();
    let graph = forest_fire(&ForestFireParams::new(n, 0.37, 0.3, 1))?;

    for model in [QueryModel::Standard, QueryModel::DegreeRevealing] {
        for &l0 in &grid {
            let mut errors = Vec::new();
            let mut truth = 0;
            for seed in 0..10 {
                let mut session = AccessSession::new(&graph, model, CountingMode::Cached);
                let handle = preprocess(&mut session, 0, &SamplerParams::new(l0), seed)?;
                truth = decompose(&graph, handle.layering(), SecondHop::L2Only)?.periphery_size();
                let est = handle.estimate().l2plus_size;
                errors.push(100.0 * (est - truth as f64).abs() / truth as f64);
            }
            let worst = errors.iter().copied().fold(0.0, f64::max);
            println!(
                "{model:?} l0={l0} |L>=2|={truth} median_error={:.2}% worst={worst:.2}%",
                median(&mut errors).unwrap_or(0.0)
            );
        }
    }
    Ok(())
}
