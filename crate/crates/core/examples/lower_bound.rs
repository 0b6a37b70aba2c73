//! Lower-bound graphs: walk cost grows with the component size while the
//! layered sampler does not.
//!
//! ```bash
//! cargo run --release -p samplayer --example lower_bound -- 20000 25,50,100
//! ```

use samplayer::config::ExperimentConfig;
use samplayer::experiments::run_lb_scaling;
use samplayer::generators::{lower_bound_graph, LowerBoundParams};

fn main() -> samplayer::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(20_000, |s| s.parse().expect("node count"));
    let grid: Vec<usize> = args
        .next()
        .unwrap_or_else(|| "25,50,100".into())
        .split(',')
        .map(|s| s.parse().expect("t list"))
        .collect();
    for &t in &grid {
        let lb = lower_bound_graph(&LowerBoundParams::new(n, t, 1))?;
        println!(
            "t={t}: core={} components={} bridges={} edges={}",
            lb.core_size,
            lb.component_count,
            lb.bridges.len(),
            lb.graph.edge_count()
        );
    }
    for counting in ["cached", "uncached"] {
        let cfg = ExperimentConfig::with_overrides(&format!("l0={}\nsamples=1000\ncounting={counting}\n", n / 10), &[])?;
        for row in run_lb_scaling(&cfg, n, &grid)? {
            println!(
                "samplayer billing {counting}, rej uncached: t={} {} interval={:?} q/s={:.1}",
                row.t, row.algorithm, row.interval, row.queries_per_sample
            );
        }
    }
    Ok(())
}
