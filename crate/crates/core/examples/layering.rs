//! Grow the base layer greedily under both query models and inspect the
//! resulting core-periphery structure.
//!
//! ```bash
//! cargo run --release -p samplayer --example layering -- 100000 1000,3000,10000
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use samplayer::exact::decompose;
use samplayer::generators::{forest_fire, ForestFireParams};
use samplayer::layering::{generate_l0, L0Options, SecondHop};
use samplayer::{AccessSession, CountingMode, Layering, QueryModel};

fn main() -> samplayer::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(20_000, |s| s.parse().expect("node count"));
    let grid: Vec<usize> = args
        .next()
        .unwrap_or_else(|| "200,600,2000".into())
        .split(',')
        .map(|s| s.parse().expect("l0 list"))
        .collect();
    let graph = forest_fire(&ForestFireParams::new(n, 0.37, 0.3, 1))?;

    for model in [QueryModel::Standard, QueryModel::DegreeRevealing] {
        for &l0 in &grid {
            let mut session = AccessSession::new(&graph, model, CountingMode::Cached);
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            let layering = generate_l0(&mut session, 0, l0, &L0Options::default(), &mut rng)?;
            let d = decompose(&graph, &layering, SecondHop::L2Only)?;
            println!(
                "{model:?} l0={l0}: |L1|={} |L2|={} |L>=2|={} components={} largest={} mu={:.2} \
                 d1+={:.3} d2-={:.3} min_rs={:.4} queries={}",
                layering.l1().len(),
                d.l2_size(),
                d.periphery_size(),
                d.components().len(),
                d.largest_component(),
                d.mu(),
                d.d1_plus_avg(),
                d.d2_minus_avg(),
                d.min_node_rs(model).unwrap_or(0.0),
                session.query_count()
            );
            // layerings persist as key=value text
            let restored = Layering::from_snapshot(&layering.to_snapshot())?;
            assert_eq!(restored.l1(), layering.l1());
        }
    }
    Ok(())
}
