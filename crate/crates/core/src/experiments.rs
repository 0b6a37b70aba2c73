//! Experiment runners behind the command-line driver. Each returns plain
//! rows that serialize to CSV with a header.

use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::access::{AccessSession, CountingMode, QueryModel};
use crate::baselines::{
    calibrate_interval, rw_sample_many, CalibrationMethod, CalibrationSpec, IntervalCalibration,
    RejAcceptance, WalkerKind,
};
use crate::config::{Algorithm, ExperimentConfig};
use crate::error::{Error, Result};
use crate::estimators::{estimate_d1_plus, estimate_d2_minus, ReachConfig, ReachSample, Reacher};
use crate::exact::decompose;
use crate::generators::{lower_bound_graph, LowerBoundParams};
use crate::graph::{Graph, NodeId};
use crate::layering::{generate_l0, L0Options, Layer, Layering, SecondHop};
use crate::sampler::{preprocess, SamplerParams};
use crate::stats::weighted_quantile;

/// A record type with a fixed CSV header.
pub trait CsvRow {
    fn header() -> &'static [&'static str];
    fn record(&self) -> Vec<String>;
}

pub fn write_csv<W: Write, R: CsvRow>(rows: &[R], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(R::header())?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}

/// Writes rows to `path`, creating parent directories.
pub fn write_csv_file<R: CsvRow>(rows: &[R], path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_csv(rows, std::fs::File::create(path)?)
}

fn layer_tag(layer: Layer) -> &'static str {
    match layer {
        Layer::L0 => "L0",
        Layer::L1 => "L1",
        Layer::Periphery => "L2+",
    }
}

/// One point of an amortized query-complexity curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    /// 1-based.
    pub sample_index: usize,
    pub node: NodeId,
    /// Billed queries so far, preprocessing included.
    pub cumulative_queries: u64,
    /// `cumulative_queries / sample_index`
    pub amortized_qps: f64,
    /// Billed queries of the sampling phase alone.
    pub sampling_queries: u64,
    pub layer: Option<Layer>,
}

impl CsvRow for ResultRow {
    fn header() -> &'static [&'static str] {
        &[
            "experiment",
            "sample_index",
            "node",
            "cumulative_queries",
            "amortized_qps",
            "sampling_queries",
            "layer",
        ][..]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.experiment.clone(),
            self.sample_index.to_string(),
            self.node.to_string(),
            self.cumulative_queries.to_string(),
            self.amortized_qps.to_string(),
            self.sampling_queries.to_string(),
            self.layer.map_or(String::new(), |l| layer_tag(l).to_string()),
        ]
    }
}

/// Output of [`run_amortized_qc`].
#[derive(Debug, Clone)]
pub struct QcOutcome {
    pub rows: Vec<ResultRow>,
    pub preprocessing_queries: u64,
    pub calibration: Option<IntervalCalibration>,
    pub interval: Option<usize>,
    /// The session's final billed count.
    pub session_queries: u64,
    pub distinct_queried: usize,
}

impl QcOutcome {
    pub fn final_amortized(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.amortized_qps)
    }

    pub fn nodes(&self) -> Vec<NodeId> {
        self.rows.iter().map(|r| r.node).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_csv(&self.rows, out)
    }
}

fn sampler_params(cfg: &ExperimentConfig) -> SamplerParams {
    SamplerParams {
        l0_size: cfg.l0,
        s1: cfg.s1,
        s2: cfg.s2,
        epsilon: cfg.epsilon,
        reach: ReachConfig {
            second_hop: cfg.second_hop,
            ..ReachConfig::default()
        },
        l0_options: L0Options {
            warmup_steps: cfg.warmup,
        },
    }
}

/// Calibration settings from the config, falling back to the size-based defaults.
pub fn calibration_spec(cfg: &ExperimentConfig, graph: &Graph) -> CalibrationSpec {
    let mut spec = CalibrationSpec::default_for(graph, vec![cfg.start], cfg.seed);
    if let Some(m) = cfg.calibrate {
        if m != spec.method {
            spec.method = m;
            if m == CalibrationMethod::EmpiricalTv {
                spec.zeta = 0.01;
                spec.walks = graph.node_count();
            } else {
                spec.zeta = 0.1;
                let n = graph.node_count() as f64;
                spec.walks = (10.0 * n.sqrt() / (spec.zeta * spec.zeta)).ceil() as usize;
            }
        }
    }
    if let Some(z) = cfg.zeta {
        spec.zeta = z;
    }
    if let Some(k) = cfg.walks {
        spec.walks = k;
    }
    spec
}

pub fn run_calibration(cfg: &ExperimentConfig, graph: &Graph) -> Result<IntervalCalibration> {
    let kind = match cfg.algorithm {
        Algorithm::Walk(k) => k,
        _ => WalkerKind::Rej,
    };
    calibrate_interval(graph, kind, &calibration_spec(cfg, graph))
}

/// Runs the configured sampler for `cfg.samples` samples and records the
/// per-sample cost curve. Random walks use `cfg.interval` or calibrate one.
pub fn run_amortized_qc(cfg: &ExperimentConfig, graph: &Graph) -> Result<QcOutcome> {
    cfg.validate()?;
    let mut session = AccessSession::new(graph, cfg.effective_model(), cfg.counting);
    let experiment = format!("qc-{}-seed{}", cfg.algorithm, cfg.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (nodes, sampling, layers, pre, calibration, interval) = match cfg.algorithm {
        Algorithm::SampLayer | Algorithm::SampLayerPlus => {
            let mut handle = preprocess(&mut session, cfg.start, &sampler_params(cfg), cfg.seed)?;
            let run = handle.sample_many(&mut session, cfg.samples)?;
            let layers = run.traces.iter().map(|t| Some(t.layer)).collect();
            (run.nodes(), run.cumulative, layers, run.preprocessing_queries, None, None)
        }
        Algorithm::Walk(kind) => {
            let (calibration, interval) = match cfg.interval {
                Some(t) => (None, t),
                None => {
                    let c = calibrate_interval(graph, kind, &calibration_spec(cfg, graph))?;
                    let t = c.interval;
                    (Some(c), t)
                }
            };
            let run = rw_sample_many(
                &mut session,
                kind,
                cfg.start,
                cfg.samples,
                interval,
                RejAcceptance::InverseDegree,
                &mut rng,
            )?;
            let layers = vec![None; run.samples.len()];
            (run.samples, run.cumulative, layers, 0, calibration, Some(interval))
        }
    };
    let rows = sampling
        .iter()
        .zip(layers)
        .zip(nodes)
        .enumerate()
        .map(|(i, ((&s, layer), node))| {
            let cumulative = s + pre;
            ResultRow {
                experiment: experiment.clone(),
                sample_index: i + 1,
                node,
                cumulative_queries: cumulative,
                amortized_qps: cumulative as f64 / (i + 1) as f64,
                sampling_queries: s,
                layer,
            }
        })
        .collect();
    Ok(QcOutcome {
        rows,
        preprocessing_queries: pre,
        calibration,
        interval,
        session_queries: session.query_count(),
        distinct_queried: session.distinct_queried(),
    })
}

/// Component-size statistics for one base-layer size.
#[derive(Debug, Clone, PartialEq)]
pub struct MuRow {
    pub l0: usize,
    /// Mean over seeds of the node-weighted mean component size.
    pub mu: f64,
    pub periphery_size: f64,
    pub components: f64,
    pub largest_component: f64,
    /// Set when every seed left the periphery empty.
    pub empty_periphery: bool,
}

impl CsvRow for MuRow {
    fn header() -> &'static [&'static str] {
        &["l0", "mu", "periphery_size", "components", "largest_component", "empty_periphery"][..]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.l0.to_string(),
            self.mu.to_string(),
            self.periphery_size.to_string(),
            self.components.to_string(),
            self.largest_component.to_string(),
            self.empty_periphery.to_string(),
        ]
    }
}

fn build_layering(
    graph: &Graph,
    model: QueryModel,
    start: NodeId,
    l0: usize,
    warmup: usize,
    seed: u64,
) -> Result<Layering> {
    let mut session = AccessSession::new(graph, model, Default::default());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate_l0(&mut session, start, l0, &L0Options { warmup_steps: warmup }, &mut rng)
}

/// For each base-layer size, the exact mean component size of the periphery,
/// averaged over seeds.
pub fn run_mu_vs_l0(
    graph: &Graph,
    grid: &[usize],
    seeds: &[u64],
    model: QueryModel,
    start: NodeId,
) -> Result<Vec<MuRow>> {
    if grid.is_empty() || seeds.is_empty() {
        return Err(Error::InvalidParameter("l0 grid and seeds must be non-empty".into()));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &l0 in grid {
        let (mut mu, mut size, mut comps, mut largest, mut empties) = (0.0, 0.0, 0.0, 0.0, 0);
        for &seed in seeds {
            let layering = build_layering(graph, model, start, l0, 0, seed)?;
            let d = decompose(graph, &layering, SecondHop::L2Only)?;
            mu += d.mu();
            size += d.periphery_size() as f64;
            comps += d.components().len() as f64;
            largest += d.largest_component() as f64;
            empties += usize::from(d.is_empty());
        }
        let k = seeds.len() as f64;
        rows.push(MuRow {
            l0,
            mu: mu / k,
            periphery_size: size / k,
            components: comps / k,
            largest_component: largest / k,
            empty_periphery: empties == seeds.len(),
        });
    }
    Ok(rows)
}

/// One histogram bin of node reachabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct HistBin {
    /// `all` or `trimmed` (top 3% of sampled reachabilities dropped).
    pub view: &'static str,
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
    /// Importance-weighted node fraction (weights `1/rs`, normalized per view).
    pub weight: f64,
}

impl CsvRow for HistBin {
    fn header() -> &'static [&'static str] {
        &["view", "bin_lo", "bin_hi", "samples", "weight"][..]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.view.to_string(),
            self.lo.to_string(),
            self.hi.to_string(),
            self.samples.to_string(),
            self.weight.to_string(),
        ]
    }
}

fn histogram(view: &'static str, rs: &[f64], bins: usize) -> Vec<HistBin> {
    let lo = rs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = rs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bins = if hi > lo { bins.max(1) } else { 1 };
    let width = (hi - lo) / bins as f64;
    let mut out: Vec<HistBin> = (0..bins)
        .map(|b| HistBin {
            view,
            lo: lo + b as f64 * width,
            hi: if b + 1 == bins { hi } else { lo + (b + 1) as f64 * width },
            samples: 0,
            weight: 0.0,
        })
        .collect();
    let total: f64 = rs.iter().map(|r| 1.0 / r).sum();
    for &r in rs {
        let b = if width > 0.0 {
            (((r - lo) / width) as usize).min(bins - 1)
        } else {
            0
        };
        out[b].samples += 1;
        out[b].weight += (1.0 / r) / total;
    }
    out
}

/// Collects `cfg.s2` reach samples and bins their reachabilities.
pub fn run_reach_hist(cfg: &ExperimentConfig, graph: &Graph) -> Result<Vec<HistBin>> {
    cfg.validate()?;
    let samples = collect_reach_samples(cfg, graph)?;
    if samples.is_empty() {
        return Ok(Vec::new());
    }
    let mut rs: Vec<f64> = samples.iter().map(|s| s.rs).collect();
    let mut bins = histogram("all", &rs, cfg.bins);
    rs.sort_by(f64::total_cmp);
    let keep = rs.len() - rs.len() * 3 / 100;
    bins.extend(histogram("trimmed", &rs[..keep.max(1)], cfg.bins));
    Ok(bins)
}

fn collect_reach_samples(cfg: &ExperimentConfig, graph: &Graph) -> Result<Vec<ReachSample>> {
    let model = cfg.effective_model();
    let mut session = AccessSession::new(graph, model, cfg.counting);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let layering = generate_l0(
        &mut session,
        cfg.start,
        cfg.l0,
        &L0Options { warmup_steps: cfg.warmup },
        &mut rng,
    )?;
    let mut reacher = Reacher::new(ReachConfig {
        second_hop: cfg.second_hop,
        ..ReachConfig::default()
    });
    let mut out = Vec::with_capacity(cfg.s2);
    for _ in 0..cfg.s2 {
        match reacher.reach(&mut session, &layering, &mut rng) {
            Ok(s) => out.push(s),
            Err(Error::NoPeriphery { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Relative error of one periphery-size estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeErrorRow {
    /// `s1` or `s2`: the quantity being swept; the other is exact.
    pub sweep: &'static str,
    pub value: usize,
    pub repetition: usize,
    pub estimate: f64,
    pub truth: usize,
    pub error_pct: f64,
}

impl CsvRow for SizeErrorRow {
    fn header() -> &'static [&'static str] {
        &["sweep", "value", "repetition", "estimate", "truth", "error_pct"][..]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.sweep.to_string(),
            self.value.to_string(),
            self.repetition.to_string(),
            self.estimate.to_string(),
            self.truth.to_string(),
            self.error_pct.to_string(),
        ]
    }
}

/// Sweeps `s1` with the exact `d2-` and `s2` with the exact `d1+`, reporting
/// the error of the periphery-size estimate against the exact size.
pub fn run_size_error(
    cfg: &ExperimentConfig,
    graph: &Graph,
    s1_grid: &[usize],
    s2_grid: &[usize],
    repetitions: usize,
) -> Result<Vec<SizeErrorRow>> {
    if repetitions == 0 {
        return Err(Error::InvalidParameter("repetitions must be >= 1".into()));
    }
    if s1_grid.is_empty() && s2_grid.is_empty() {
        return Err(Error::InvalidParameter("both grids are empty".into()));
    }
    if s1_grid.contains(&0) || s2_grid.contains(&0) {
        return Err(Error::InvalidParameter("grid values must be >= 1".into()));
    }
    let model = cfg.effective_model();
    let layering = build_layering(graph, model, cfg.start, cfg.l0, cfg.warmup, cfg.seed)?;
    let exact = decompose(graph, &layering, cfg.second_hop)?;
    let truth = exact.periphery_size();
    if truth == 0 {
        return Err(Error::InvalidParameter("periphery is empty; nothing to estimate".into()));
    }
    let l1 = layering.l1().len() as f64;
    let row = |sweep, value, repetition, estimate: f64| SizeErrorRow {
        sweep,
        value,
        repetition,
        estimate,
        truth,
        error_pct: 100.0 * (estimate - truth as f64).abs() / truth as f64,
    };
    let mut rows = Vec::new();
    for rep in 0..repetitions {
        let seed = cfg.seed.wrapping_add(1 + rep as u64);
        for &s1 in s1_grid {
            let mut session = AccessSession::new(graph, model, cfg.counting);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (s1 as u64) << 20);
            let d1 = estimate_d1_plus(&mut session, &layering, s1, &mut rng)?;
            rows.push(row("s1", s1, rep, l1 * d1 / exact.d2_minus_avg()));
        }
        for &s2 in s2_grid {
            let mut session = AccessSession::new(graph, model, cfg.counting);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (s2 as u64) << 40);
            let mut reacher = Reacher::new(ReachConfig {
                second_hop: cfg.second_hop,
                ..ReachConfig::default()
            });
            let samples = (0..s2)
                .map(|_| reacher.reach(&mut session, &layering, &mut rng))
                .collect::<Result<Vec<_>>>()?;
            let d2 = estimate_d2_minus(&samples)?;
            rows.push(row("s2", s2, rep, l1 * exact.d1_plus_avg() / d2));
        }
    }
    Ok(rows)
}

/// Median error per `(sweep, value)` in grid order.
pub fn median_errors(rows: &[SizeErrorRow]) -> Vec<(&'static str, usize, f64)> {
    let mut keys: Vec<(&'static str, usize)> = Vec::new();
    for r in rows {
        if !keys.contains(&(r.sweep, r.value)) {
            keys.push((r.sweep, r.value));
        }
    }
    keys.into_iter()
        .map(|(sweep, value)| {
            let errs: Vec<f64> = rows
                .iter()
                .filter(|r| r.sweep == sweep && r.value == value)
                .map(|r| r.error_pct)
                .collect();
            let w = vec![1.0; errs.len()];
            // lower median, as a weighted 0.5-quantile
            let m = weighted_quantile(&errs, &w, 0.5).unwrap_or(f64::NAN);
            (sweep, value, m)
        })
        .collect()
}

/// Per-sample cost of one algorithm on one lower-bound graph.
#[derive(Debug, Clone, PartialEq)]
pub struct LbRow {
    pub t: usize,
    pub algorithm: &'static str,
    pub interval: Option<usize>,
    pub samples: usize,
    pub total_queries: u64,
    pub queries_per_sample: f64,
}

impl CsvRow for LbRow {
    fn header() -> &'static [&'static str] {
        &["t", "algorithm", "interval", "samples", "total_queries", "queries_per_sample"][..]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.t.to_string(),
            self.algorithm.to_string(),
            self.interval.map_or(String::new(), |t| t.to_string()),
            self.samples.to_string(),
            self.total_queries.to_string(),
            self.queries_per_sample.to_string(),
        ]
    }
}

/// For each component size `t`: calibrates REJ on the lower-bound graph and
/// samples with it, then samples with the layered sampler using `cfg.l0`.
/// REJ is billed uncached; the layered sampler uses `cfg.counting`. Seeds and
/// sample count come from `cfg`.
pub fn run_lb_scaling(cfg: &ExperimentConfig, n: usize, t_grid: &[usize]) -> Result<Vec<LbRow>> {
    if t_grid.is_empty() {
        return Err(Error::InvalidParameter("t grid is empty".into()));
    }
    let mut rows = Vec::new();
    for &t in t_grid {
        let lb = lower_bound_graph(&LowerBoundParams::new(n, t, cfg.seed))?;
        let graph = &lb.graph;
        let interval = match cfg.interval {
            Some(i) => i,
            None => {
                // worst case over starts: a component leaf must escape its bridge
                let mut spec = calibration_spec(cfg, graph);
                spec.starts.push(lb.component_start(0) + 1);
                calibrate_interval(graph, WalkerKind::Rej, &spec)?.interval
            }
        };
        // walk length is what scales with t; cached billing would saturate at n
        let mut session = AccessSession::new(graph, QueryModel::Standard, CountingMode::Uncached);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let run = rw_sample_many(
            &mut session,
            WalkerKind::Rej,
            cfg.start,
            cfg.samples,
            interval,
            RejAcceptance::InverseDegree,
            &mut rng,
        )?;
        let total = session.query_count();
        rows.push(LbRow {
            t,
            algorithm: "rej",
            interval: Some(interval),
            samples: cfg.samples,
            total_queries: total,
            queries_per_sample: total as f64 / cfg.samples as f64,
        });
        debug_assert_eq!(run.samples.len(), cfg.samples);

        let mut session = AccessSession::new(graph, QueryModel::Standard, cfg.counting);
        let mut handle = preprocess(&mut session, cfg.start, &sampler_params(cfg), cfg.seed)?;
        handle.sample_many(&mut session, cfg.samples)?;
        let total = session.query_count();
        rows.push(LbRow {
            t,
            algorithm: "samplayer",
            interval: None,
            samples: cfg.samples,
            total_queries: total,
            queries_per_sample: total as f64 / cfg.samples as f64,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{path, star};

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::with_overrides(text, &[]).unwrap()
    }

    #[test]
    fn qc_on_star() {
        let g = star(5).unwrap();
        let c = cfg("graph=star\nn=5\nstart=1\nl0=1\ns1=10\ns2=10\nsamples=10");
        let out = run_amortized_qc(&c, &g).unwrap();
        assert_eq!(out.rows.len(), 10);
        let last = out.rows.last().unwrap();
        assert_eq!(last.cumulative_queries, out.session_queries);
        assert_eq!(out.session_queries as usize, out.distinct_queried);
        for r in &out.rows {
            assert_eq!(r.amortized_qps, r.cumulative_queries as f64 / r.sample_index as f64);
        }
        let mut a = Vec::new();
        let mut b = Vec::new();
        out.write_csv(&mut a).unwrap();
        run_amortized_qc(&c, &g).unwrap().write_csv(&mut b).unwrap();
        assert_eq!(a, b);
        assert!(String::from_utf8(a).unwrap().starts_with("experiment,sample_index,node,"));
    }

    #[test]
    fn qc_walk_with_fixed_interval() {
        let g = path(4).unwrap();
        let c = cfg("graph=path\nn=4\nalgorithm=mh\ninterval=3\nsamples=25");
        let out = run_amortized_qc(&c, &g).unwrap();
        assert_eq!(out.interval, Some(3));
        assert_eq!(out.rows.last().unwrap().cumulative_queries, out.session_queries);
        let bad = ExperimentConfig::with_overrides("algorithm=mh+\nmodel=standard", &[]);
        assert!(bad.is_err());
    }

    #[test]
    fn mu_examples() {
        let g = star(5).unwrap();
        let rows = run_mu_vs_l0(&g, &[1], &[1, 2], QueryModel::Standard, 1).unwrap();
        assert_eq!(rows[0].mu, 1.0);
        let rows = run_mu_vs_l0(&g, &[6], &[1], QueryModel::Standard, 1).unwrap();
        assert!(rows[0].empty_periphery);
        assert_eq!(rows[0].mu, 0.0);
        assert!(run_mu_vs_l0(&g, &[], &[1], QueryModel::Standard, 1).is_err());
    }

    #[test]
    fn reach_hist_examples() {
        let g = star(5).unwrap();
        let bins = run_reach_hist(&cfg("start=1\nl0=1\ns2=50"), &g).unwrap();
        assert_eq!(bins.len(), 2);
        assert_eq!((bins[0].lo, bins[0].hi, bins[0].samples), (0.25, 0.25, 50));
        assert!((bins[0].weight - 1.0).abs() < 1e-12);
        let g = path(4).unwrap();
        let bins = run_reach_hist(&cfg("start=0\nl0=1\ns2=20"), &g).unwrap();
        assert_eq!(bins[0].lo, 0.5);
    }

    #[test]
    fn size_error_is_zero_on_star() {
        let g = star(5).unwrap();
        let rows = run_size_error(&cfg("start=1\nl0=1"), &g, &[1, 5], &[1, 5], 3).unwrap();
        assert_eq!(rows.len(), 12);
        assert!(rows.iter().all(|r| r.error_pct == 0.0 && r.truth == 4));
        assert!(run_size_error(&cfg("start=1\nl0=1"), &g, &[1], &[1], 0).is_err());
        assert_eq!(median_errors(&rows).len(), 4);
    }

    #[test]
    fn lb_rejects_oversized_components() {
        let c = cfg("samples=5\nl0=50");
        assert!(run_lb_scaling(&c, 100, &[60]).is_err());
    }
}
