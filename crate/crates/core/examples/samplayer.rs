//! Preprocess a Forest Fire graph, draw samples and break the query cost down
//! by layer.
//!
//! ```bash
//! cargo run --release -p samplayer --example samplayer -- 100000 2000 1000
//! ```

use samplayer::estimators::diagnostics;
use samplayer::exact::decompose;
use samplayer::generators::{forest_fire, ForestFireParams};
use samplayer::layering::SecondHop;
use samplayer::{preprocess, AccessSession, CountingMode, Layer, QueryModel, SamplerParams};

fn arg(i: usize, default: usize) -> usize {
    std::env::args()
        .nth(i)
        .map(|s| s.parse().expect("integer argument"))
        .unwrap_or(default)
}

fn main() -> samplayer::Result<()> {
    let (n, l0, samples) = (arg(1, 20_000), arg(2, 400), arg(3, 1000));
    let graph = forest_fire(&ForestFireParams::new(n, 0.37, 0.3, 1))?;
    let mut session = AccessSession::new(&graph, QueryModel::Standard, CountingMode::Cached);

    let mut handle = preprocess(&mut session, 0, &SamplerParams::new(l0), 7)?;
    let layering = handle.layering();
    let truth = decompose(&graph, layering, SecondHop::L2Only)?;
    let est = handle.estimate();
    println!("|L0|={} |L1|={} |L>=2|={} (estimate {:.0})", layering.l0().len(), layering.l1().len(), truth.periphery_size(), est.l2plus_size);
    println!("rs0={:.5} exact_min_rs={:.5}", handle.rs0(), truth.min_node_rs(QueryModel::Standard).unwrap_or(0.0));
    println!("exact mu={:.3} largest component={}", truth.mu(), truth.largest_component());
    let diag = diagnostics(handle.reacher(), handle.reach_samples(), handle.rs0())?;
    print!("{}", diag.to_key_values());
    println!("preprocessing_queries={}", handle.preprocessing_queries());

    let run = handle.sample_many(&mut session, samples)?;
    let mut per_layer = [(0usize, 0u64, 0u64); 3];
    for t in &run.traces {
        let slot = match t.layer {
            Layer::L0 => 0,
            Layer::L1 => 1,
            Layer::Periphery => 2,
        };
        per_layer[slot].0 += 1;
        per_layer[slot].1 += t.queries_spent;
        per_layer[slot].2 += t.rejections;
    }
    for (name, (count, queries, rejections)) in ["L0", "L1", "L>=2"].iter().zip(per_layer) {
        println!("{name}: samples={count} queries={queries} rejections={rejections}");
    }
    println!(
        "total_queries={} amortized={:.2} sampling_only={:.2}",
        run.total_queries(),
        run.amortized_folded(samples - 1),
        run.amortized_sampling(samples - 1)
    );
    Ok(())
}
