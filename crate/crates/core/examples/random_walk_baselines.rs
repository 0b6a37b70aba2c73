//! REJ, MH and MH+ with calibrated sampling intervals: per-sample cost and
//! the uniformity of what they return.
//!
//! ```bash
//! cargo run --release -p samplayer --example random_walk_baselines -- 20000 20000
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use samplayer::baselines::{calibrate_interval, rw_sample_many, CalibrationSpec, RejAcceptance, WalkerKind};
use samplayer::generators::{forest_fire, ForestFireParams};
use samplayer::stats::{empirical_tv_to_uniform, uniform_reference_tv};
use samplayer::{AccessSession, CountingMode, QueryModel};

fn arg(i: usize, default: usize) -> usize {
    std::env::args()
        .nth(i)
        .map(|s| s.parse().expect("integer argument"))
        .unwrap_or(default)
}

fn main() -> samplayer::Result<()> {
    let (n, k) = (arg(1, 10_000), arg(2, 10_000));
    let graph = forest_fire(&ForestFireParams::new(n, 0.37, 0.3, 1))?;
    let reference = uniform_reference_tv(k, n, 20, 1);
    for kind in [WalkerKind::Rej, WalkerKind::Mh, WalkerKind::MhPlus] {
        let cal = calibrate_interval(&graph, kind, &CalibrationSpec::default_for(&graph, vec![0], 1))?;
        let model = if kind == WalkerKind::MhPlus { QueryModel::DegreeRevealing } else { QueryModel::Standard };
        for mode in [CountingMode::Cached, CountingMode::Uncached] {
            let mut session = AccessSession::new(&graph, model, mode);
            let mut rng = ChaCha8Rng::seed_from_u64(2);
            let run = rw_sample_many(&mut session, kind, 0, k, cal.interval, RejAcceptance::InverseDegree, &mut rng)?;
            let tv = empirical_tv_to_uniform(&run.samples, n)?;
            println!(
                "{:>3} T={:>4} {mode:?}: q/s={:.2} steps/sample={:.1} tv={tv:.4} (uniform reference {reference:.4})",
                kind.name(),
                cal.interval,
                session.query_count() as f64 / k as f64,
                run.steps as f64 / k as f64
            );
        }
    }
    Ok(())
}
