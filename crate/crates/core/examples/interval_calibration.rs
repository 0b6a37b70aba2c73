//! Offline calibration of the walk interval: empirical TV against the
//! collision test, on a Forest Fire graph and on the lower-bound graph.
//!
//! ```bash
//! cargo run --release -p samplayer --example interval_calibration -- 20000
//! ```

use samplayer::baselines::{calibrate_interval, CalibrationMethod, CalibrationSpec, WalkerKind};
use samplayer::generators::{forest_fire, lower_bound_graph, ForestFireParams, LowerBoundParams};
use samplayer::Graph;

fn report(name: &str, graph: &Graph, starts: Vec<usize>) -> samplayer::Result<()> {
    let n = graph.node_count();
    for kind in [WalkerKind::Rej, WalkerKind::Mh] {
        for method in [CalibrationMethod::EmpiricalTv, CalibrationMethod::Collisions] {
            let mut spec = CalibrationSpec::default_for(graph, starts.clone(), 1);
            spec.method = method;
            if method == CalibrationMethod::Collisions {
                spec.zeta = 0.1;
                spec.walks = (10.0 * (n as f64).sqrt() / (spec.zeta * spec.zeta)).ceil() as usize;
            } else {
                spec.zeta = 0.01;
                spec.walks = n;
            }
            let cal = calibrate_interval(graph, kind, &spec)?;
            println!("{name} {:>3} {method:?}: T={} statistic={:.4} walks={}", kind.name(), cal.interval, cal.achieved, cal.walks_used);
        }
    }
    Ok(())
}

fn main() -> samplayer::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(20_000, |s| s.parse().expect("node count"));
    report("forest-fire", &forest_fire(&ForestFireParams::new(n, 0.37, 0.3, 1))?, vec![0])?;
    for t in [25, 100] {
        let lb = lower_bound_graph(&LowerBoundParams::new(n, t, 1))?;
        // a start inside a component exposes the slow escape through its bridge
        let starts = vec![0, lb.component_start(0) + 1];
        report(&format!("lower-bound t={t}"), &lb.graph, starts)?;
    }
    Ok(())
}
