//! Random-walk baselines: rejection sampling on a simple random walk (REJ)
//! and Metropolis-Hastings with and without free neighbor degrees. Samples
//! are taken from one long walk at a fixed interval `T`, which
//! [`calibrate_interval`] picks offline with full graph access.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::access::{AccessSession, QueryModel};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::stats::{collision_test, tv_from_counts, uniform_reference_tv};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WalkerKind {
    Rej,
    Mh,
    MhPlus,
}

impl WalkerKind {
    pub fn name(self) -> &'static str {
        match self {
            WalkerKind::Rej => "rej",
            WalkerKind::Mh => "mh",
            WalkerKind::MhPlus => "mh+",
        }
    }
}

impl std::str::FromStr for WalkerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rej" => Ok(WalkerKind::Rej),
            "mh" => Ok(WalkerKind::Mh),
            "mh+" | "mhplus" => Ok(WalkerKind::MhPlus),
            _ => Err(Error::InvalidParameter(format!("unknown walker '{s}'"))),
        }
    }
}

/// Acceptance rule REJ applies to each candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RejAcceptance {
    /// Accept with probability `1/deg(v)`; needs no global knowledge.
    #[default]
    InverseDegree,
    /// Accept with probability `d_min/deg(v)` for a known minimum degree.
    MinDegree(usize),
}

fn check_kind(session: &AccessSession<'_>, kind: WalkerKind) -> Result<()> {
    if kind == WalkerKind::MhPlus && session.model() != QueryModel::DegreeRevealing {
        return Err(Error::InvalidParameter(
            "mh+ needs a degree-revealing session".into(),
        ));
    }
    Ok(())
}

/// One transition of the chain from `current`.
pub fn walk_step<R: Rng + ?Sized>(
    session: &mut AccessSession<'_>,
    kind: WalkerKind,
    current: NodeId,
    rng: &mut R,
) -> Result<NodeId> {
    check_kind(session, kind)?;
    let neighbors = session.query(current)?;
    if neighbors.is_empty() {
        return Err(Error::IsolatedNode(current));
    }
    let proposal = neighbors[rng.random_range(0..neighbors.len())];
    if kind == WalkerKind::Rej {
        return Ok(proposal);
    }
    // MH+ always knows the proposal's degree; MH may have to query it
    let d_prop = session.degree(proposal)?;
    let d_cur = neighbors.len();
    if d_prop <= d_cur || rng.random_range(0..d_prop) < d_cur {
        Ok(proposal)
    } else {
        Ok(current)
    }
}

/// Samples and cost series of one long walk.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkRun {
    pub samples: Vec<NodeId>,
    /// Billed queries after each accepted sample.
    pub cumulative: Vec<u64>,
    pub steps: u64,
    pub candidates: u64,
}

impl WalkRun {
    pub fn amortized(&self, i: usize) -> f64 {
        self.cumulative[i] as f64 / (i + 1) as f64
    }
}

/// Runs one walk from `v0`; every `interval` steps the position is a
/// candidate. MH candidates are accepted outright; REJ candidates pass the
/// degree rejection of `rej`. Stops after `n` accepted samples.
#[allow(clippy::too_many_arguments)]
pub fn rw_sample_many<R: Rng + ?Sized>(
    session: &mut AccessSession<'_>,
    kind: WalkerKind,
    v0: NodeId,
    n: usize,
    interval: usize,
    rej: RejAcceptance,
    rng: &mut R,
) -> Result<WalkRun> {
    check_kind(session, kind)?;
    if n == 0 || interval == 0 {
        return Err(Error::InvalidParameter(
            "number of samples and interval must be >= 1".into(),
        ));
    }
    let start = session.query_count();
    let mut samples = Vec::with_capacity(n);
    let mut cumulative = Vec::with_capacity(n);
    let (mut current, mut steps, mut candidates) = (v0, 0u64, 0u64);
    while samples.len() < n {
        for _ in 0..interval {
            current = walk_step(session, kind, current, rng)?;
        }
        steps += interval as u64;
        candidates += 1;
        let accept = match kind {
            WalkerKind::Rej => {
                let d = session.degree(current)?;
                let numerator = match rej {
                    RejAcceptance::InverseDegree => 1,
                    RejAcceptance::MinDegree(m) => m.clamp(1, d),
                };
                rng.random_range(0..d) < numerator
            }
            WalkerKind::Mh | WalkerKind::MhPlus => true,
        };
        if accept {
            samples.push(current);
            cumulative.push(session.query_count() - start);
        }
    }
    Ok(WalkRun {
        samples,
        cumulative,
        steps,
        candidates,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CalibrationMethod {
    EmpiricalTv,
    Collisions,
}

impl std::str::FromStr for CalibrationMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tv" => Ok(CalibrationMethod::EmpiricalTv),
            "collisions" => Ok(CalibrationMethod::Collisions),
            _ => Err(Error::InvalidParameter(format!("unknown calibration method '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationSpec {
    pub method: CalibrationMethod,
    /// Walks per start.
    pub walks: usize,
    pub zeta: f64,
    pub starts: Vec<NodeId>,
    /// Largest interval tried.
    pub cap: usize,
    pub reference_trials: usize,
    pub seed: u64,
}

impl CalibrationSpec {
    /// Empirical TV with `k = n` up to `10^5` nodes, collisions with
    /// `k = ⌈10 √n / ζ²⌉` above.
    pub fn default_for(graph: &Graph, starts: Vec<NodeId>, seed: u64) -> Self {
        let n = graph.node_count();
        let (method, zeta, walks) = if n <= 100_000 {
            (CalibrationMethod::EmpiricalTv, 0.01, n)
        } else {
            let zeta = 0.1;
            let k = (10.0 * (n as f64).sqrt() / (zeta * zeta)).ceil() as usize;
            (CalibrationMethod::Collisions, zeta, k)
        };
        Self {
            method,
            walks,
            zeta,
            starts,
            cap: default_cap(n),
            reference_trials: 20,
            seed,
        }
    }
}

/// `10^4 · log2 n`
pub fn default_cap(n: usize) -> usize {
    (10_000.0 * (n.max(2) as f64).log2()).ceil() as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalCalibration {
    pub interval: usize,
    pub method: CalibrationMethod,
    pub zeta: f64,
    pub walks_used: usize,
    /// Statistic at the chosen interval for the slowest start: `|TV - ref|`
    /// or the collision z-score.
    pub achieved: f64,
    pub reference_tv: Option<f64>,
}

impl IntervalCalibration {
    pub fn to_key_values(&self) -> String {
        format!(
            "interval={}\nmethod={}\nzeta={}\nwalks_used={}\nachieved={:.6}\nreference_tv={}\n",
            self.interval,
            match self.method {
                CalibrationMethod::EmpiricalTv => "tv",
                CalibrationMethod::Collisions => "collisions",
            },
            self.zeta,
            self.walks_used,
            self.achieved,
            self.reference_tv.map_or("".to_string(), |r| format!("{r:.6}")),
        )
    }
}

fn raw_step<R: Rng + ?Sized>(graph: &Graph, kind: WalkerKind, v: NodeId, rng: &mut R) -> NodeId {
    let nb = graph.neighbors(v);
    let w = nb[rng.random_range(0..nb.len())];
    match kind {
        WalkerKind::Rej => w,
        _ => {
            let (dc, dw) = (nb.len(), graph.degree(w));
            if dw <= dc || rng.random_range(0..dw) < dc {
                w
            } else {
                v
            }
        }
    }
}

/// Reference TV for REJ positions: `k` exact draws from the degree-proportional
/// stationary law, reweighted by `1/deg`, compared against uniform.
fn rej_reference_tv(graph: &Graph, k: usize, trials: usize, seed: u64) -> Result<f64> {
    let dist = rand_distr::weighted::WeightedIndex::new(
        (0..graph.node_count()).map(|v| graph.degree(v) as u64),
    )
    .map_err(|e| Error::InvalidParameter(format!("degree distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; graph.node_count()];
    let mut total = 0.0;
    for _ in 0..trials.max(1) {
        counts.iter_mut().for_each(|c| *c = 0);
        for _ in 0..k {
            counts[rng.sample(&dist)] += 1;
        }
        total += rej_weighted_tv(graph, &counts);
    }
    Ok(total / trials.max(1) as f64)
}

/// TV to uniform of the position histogram after `1/deg` reweighting.
fn rej_weighted_tv(graph: &Graph, counts: &[u64]) -> f64 {
    let weights: Vec<f64> = counts
        .iter()
        .enumerate()
        .map(|(v, &c)| c as f64 / graph.degree(v) as f64)
        .collect();
    let z: f64 = weights.iter().sum();
    let n = counts.len() as f64;
    0.5 * weights.iter().map(|w| (w / z - 1.0 / n).abs()).sum::<f64>()
}

/// Smallest interval after which `k` independent walks from each start look
/// uniform (after degree reweighting for REJ). Uses full graph access and is
/// not billed. MH and MH+ share one chain and calibrate identically.
pub fn calibrate_interval(
    graph: &Graph,
    kind: WalkerKind,
    spec: &CalibrationSpec,
) -> Result<IntervalCalibration> {
    let n = graph.node_count();
    if spec.walks == 0 || !(spec.zeta > 0.0) || spec.starts.is_empty() || spec.cap == 0 {
        return Err(Error::InvalidParameter(
            "calibration needs walks >= 1, zeta > 0, a start node and cap >= 1".into(),
        ));
    }
    if let Some(v) = (0..n).find(|&v| graph.degree(v) == 0) {
        return Err(Error::IsolatedNode(v));
    }
    for &s in &spec.starts {
        if s >= n {
            return Err(Error::NodeOutOfRange { node: s, node_count: n });
        }
    }
    let reference = match spec.method {
        CalibrationMethod::EmpiricalTv => Some(match kind {
            WalkerKind::Rej => rej_reference_tv(graph, spec.walks, spec.reference_trials, spec.seed)?,
            _ => uniform_reference_tv(spec.walks, n, spec.reference_trials, spec.seed),
        }),
        CalibrationMethod::Collisions => None,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut interval = 1;
    let mut achieved = 0.0;
    let mut counts = vec![0u64; n];
    let mut thinned = Vec::new();
    for &start in &spec.starts {
        let mut pos = vec![start; spec.walks];
        let mut best = f64::INFINITY;
        let mut found = None;
        for t in 1..=spec.cap {
            for p in pos.iter_mut() {
                *p = raw_step(graph, kind, *p, &mut rng);
            }
            let (stat, pass) = match spec.method {
                CalibrationMethod::EmpiricalTv => {
                    counts.iter_mut().for_each(|c| *c = 0);
                    for &p in &pos {
                        counts[p] += 1;
                    }
                    let tv = match kind {
                        WalkerKind::Rej => rej_weighted_tv(graph, &counts),
                        _ => tv_from_counts(&counts, spec.walks),
                    };
                    let gap = (tv - reference.unwrap_or(0.0)).abs();
                    (gap, gap <= spec.zeta)
                }
                CalibrationMethod::Collisions => {
                    let z = match kind {
                        WalkerKind::Rej => {
                            thinned.clear();
                            thinned.extend(
                                pos.iter()
                                    .copied()
                                    .filter(|&p| rng.random_range(0..graph.degree(p)) == 0),
                            );
                            if thinned.len() < 2 {
                                f64::INFINITY
                            } else {
                                collision_test(&thinned, n)?.z
                            }
                        }
                        _ => collision_test(&pos, n)?.z,
                    };
                    (z, z <= 3.0)
                }
            };
            best = best.min(stat);
            if pass {
                found = Some((t, stat));
                break;
            }
        }
        match found {
            Some((t, stat)) => {
                if t >= interval {
                    interval = t;
                    achieved = stat;
                }
            }
            None => return Err(Error::CalibrationFailed { cap: spec.cap, best }),
        }
    }
    Ok(IntervalCalibration {
        interval,
        method: spec.method,
        zeta: spec.zeta,
        walks_used: spec.walks,
        achieved,
        reference_tv: reference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::CountingMode;
    use crate::generators::{complete, path, random_regular, star};

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    #[test]
    fn step_examples() {
        let tri = complete(3).unwrap();
        let mut s = AccessSession::new(&tri, QueryModel::Standard, CountingMode::Cached);
        let mut r = rng();
        for _ in 0..100 {
            let v = walk_step(&mut s, WalkerKind::Mh, 0, &mut r).unwrap();
            assert_ne!(v, 0);
        }
        let g = star(5).unwrap();
        let mut s = AccessSession::new(&g, QueryModel::Standard, CountingMode::Cached);
        let moved = (0..50_000)
            .filter(|_| walk_step(&mut s, WalkerKind::Mh, 1, &mut r).unwrap() == 0)
            .count();
        assert!((moved as f64 / 50_000.0 - 0.2).abs() < 0.01);
        let p = path(4).unwrap();
        let mut s = AccessSession::new(&p, QueryModel::Standard, CountingMode::Cached);
        let left = (0..20_000)
            .filter(|_| walk_step(&mut s, WalkerKind::Rej, 1, &mut r).unwrap() == 0)
            .count();
        assert!((left as f64 / 20_000.0 - 0.5).abs() < 0.015);
    }

    #[test]
    fn mh_plus_needs_degree_revealing() {
        let g = star(3).unwrap();
        let mut s = AccessSession::new(&g, QueryModel::Standard, CountingMode::Cached);
        assert!(walk_step(&mut s, WalkerKind::MhPlus, 0, &mut rng()).is_err());
        assert!(rw_sample_many(&mut s, WalkerKind::Rej, 0, 0, 1, RejAcceptance::default(), &mut rng()).is_err());
    }

    #[test]
    fn step_query_costs() {
        let g = random_regular(200, 4, 1).unwrap();
        let mut r = rng();
        for (model, kind, max_new) in [
            (QueryModel::Standard, WalkerKind::Mh, 2),
            (QueryModel::DegreeRevealing, WalkerKind::MhPlus, 1),
            (QueryModel::Standard, WalkerKind::Rej, 1),
        ] {
            let mut s = AccessSession::new(&g, model, CountingMode::Cached);
            let mut v = 0;
            for _ in 0..2000 {
                let before = s.query_count();
                v = walk_step(&mut s, kind, v, &mut r).unwrap();
                assert!(s.query_count() - before <= max_new);
            }
            assert_eq!(s.query_count() as usize, s.distinct_queried());
        }
    }

    #[test]
    fn rej_is_uniform_on_star_and_path() {
        for g in [star(5).unwrap(), path(4).unwrap()] {
            let n = g.node_count();
            let mut s = AccessSession::new(&g, QueryModel::Standard, CountingMode::Cached);
            let run = rw_sample_many(&mut s, WalkerKind::Rej, 0, 100_000, 7, RejAcceptance::default(), &mut rng())
                .unwrap();
            let mut counts = vec![0u64; n];
            for &v in &run.samples {
                counts[v] += 1;
            }
            let p = 1.0 / n as f64;
            let sigma = (100_000.0 * p * (1.0 - p)).sqrt();
            for c in counts {
                assert!((c as f64 - 100_000.0 * p).abs() <= 3.0 * sigma, "{c}");
            }
            assert_eq!(*run.cumulative.last().unwrap(), s.query_count());
        }
    }

    #[test]
    fn mh_positions_become_uniform() {
        let g = star(6).unwrap();
        let mut r = rng();
        let mut counts = vec![0u64; g.node_count()];
        for _ in 0..100_000 {
            let mut v = 0;
            for _ in 0..100 {
                v = raw_step(&g, WalkerKind::Mh, v, &mut r);
            }
            counts[v] += 1;
        }
        assert!(tv_from_counts(&counts, 100_000) < 0.05);
    }

    #[test]
    fn complete_graph_mixes_immediately() {
        let g = complete(10).unwrap();
        for kind in [WalkerKind::Rej, WalkerKind::Mh] {
            let spec = CalibrationSpec {
                method: CalibrationMethod::EmpiricalTv,
                walks: 10_000,
                zeta: 0.15,
                starts: vec![0],
                cap: 50,
                reference_trials: 20,
                seed: 1,
            };
            let cal = calibrate_interval(&g, kind, &spec).unwrap();
            assert_eq!(cal.interval, 1);
        }
    }

    #[test]
    fn expander_interval_is_logarithmic() {
        let g = random_regular(10_000, 10, 5).unwrap();
        let spec = CalibrationSpec::default_for(&g, vec![0, 5000], 3);
        let cal = calibrate_interval(&g, WalkerKind::Rej, &spec).unwrap();
        assert!(cal.interval as f64 <= 20.0 * (10_000f64).log2(), "{cal:?}");
        let spec = CalibrationSpec {
            method: CalibrationMethod::Collisions,
            walks: 20_000,
            zeta: 0.1,
            ..spec
        };
        let cal = calibrate_interval(&g, WalkerKind::Mh, &spec).unwrap();
        assert!(cal.interval as f64 <= 20.0 * (10_000f64).log2(), "{cal:?}");
    }

    #[test]
    fn calibration_failure_reports_best() {
        // a bipartite walk never mixes from a fixed start
        let g = path(2).unwrap();
        let spec = CalibrationSpec {
            method: CalibrationMethod::EmpiricalTv,
            walks: 1000,
            zeta: 0.01,
            starts: vec![0],
            cap: 20,
            reference_trials: 5,
            seed: 0,
        };
        match calibrate_interval(&g, WalkerKind::Rej, &spec) {
            Err(Error::CalibrationFailed { cap: 20, best }) => assert!(best > 0.4),
            other => panic!("{other:?}"),
        }
    }
}
