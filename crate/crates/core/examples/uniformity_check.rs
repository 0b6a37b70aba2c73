//! How the baseline quantile trades cost for uniformity: for each epsilon,
//! the exact output distribution of the sampler (from full knowledge of the
//! layering) is compared with uniform, both directly and through the
//! empirical TV of n simulated draws.
//!
//! ```bash
//! cargo run --release -p samplayer --example uniformity_check -- 100000 1000
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{weighted::WeightedIndex, Distribution};

use samplayer::estimators::estimate_baseline_reachability;
use samplayer::exact::decompose;
use samplayer::generators::{forest_fire, ForestFireParams};
use samplayer::layering::SecondHop;
use samplayer::stats::{empirical_tv_to_uniform, uniform_reference_tv};
use samplayer::{preprocess, AccessSession, CountingMode, QueryModel, SamplerParams};

fn main() -> samplayer::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<usize>().expect("integer"));
    let n = args.next().unwrap_or(20_000);
    let l0 = args.next().unwrap_or(200);
    let graph = forest_fire(&ForestFireParams::new(n, 0.37, 0.3, 1))?;

    for model in [QueryModel::Standard, QueryModel::DegreeRevealing] {
        let mut session = AccessSession::new(&graph, model, CountingMode::Cached);
        let handle = preprocess(&mut session, 0, &SamplerParams::new(l0), 3)?;
        let truth = decompose(&graph, handle.layering(), SecondHop::L2Only)?;
        let l_bar = handle.estimate().l2plus_size;
        println!(
            "{model:?}: |L>=2|={} estimate={l_bar:.0} reference_tv={:.4}",
            truth.periphery_size(),
            uniform_reference_tv(n, n, 5, 9)
        );
        for eps in [0.1, 0.05, 0.02, 0.01, 0.005, 0.001] {
            let rs0 = estimate_baseline_reachability(handle.reach_samples(), eps)?;
            let exact_rs0 = truth.rs_quantile(eps, model)?;
            let p = truth.output_distribution(l_bar, rs0, model);
            let tv: f64 = 0.5 * p.iter().map(|x| (x - 1.0 / n as f64).abs()).sum::<f64>();
            let dist = WeightedIndex::new(&p).expect("valid distribution");
            let mut rng = ChaCha8Rng::seed_from_u64(eps.to_bits());
            let draws: Vec<usize> = (0..n).map(|_| dist.sample(&mut rng)).collect();
            let empirical = empirical_tv_to_uniform(&draws, n)?;
            // expected acceptance of a periphery reach
            let accept = truth
                .components()
                .iter()
                .map(|c| c.rs(model) * (rs0 / (c.rs(model) / c.len() as f64)).min(1.0))
                .sum::<f64>()
                / truth.components().iter().map(|c| c.rs(model)).sum::<f64>();
            println!(
                "  eps={eps:<6} rs0={rs0:.5} exact_quantile={exact_rs0:.5} exact_tv={tv:.4} empirical_tv={empirical:.4} accept={accept:.4}"
            );
        }
    }
    Ok(())
}
