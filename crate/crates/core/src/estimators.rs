//! Reaching the periphery and the preprocessing estimators built on it:
//! periphery size, baseline reachability and layering diagnostics.

use std::collections::HashMap;

use rand::Rng;

use crate::access::{AccessSession, CountingMode, QueryModel};
use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::layering::{
    comp_reachability_plus, comp_reachability_sl, component_bfs, Component, Layering, SecondHop,
};
use crate::stats::weighted_quantile;

pub const DEFAULT_ATTEMPT_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReachConfig {
    pub second_hop: SecondHop,
    /// Consecutive failed attempts after which the periphery is declared unreachable.
    pub attempt_cap: u64,
}

impl Default for ReachConfig {
    fn default() -> Self {
        Self {
            second_hop: SecondHop::default(),
            attempt_cap: DEFAULT_ATTEMPT_CAP,
        }
    }
}

/// An explored component and its reachability score `rs(C)`.
#[derive(Debug, Clone)]
pub struct ReachedComponent {
    pub component: Component,
    pub rs: f64,
}

impl ReachedComponent {
    /// Node score `rs(v) = rs(C) / |C|`, shared by every node of the component.
    pub fn node_rs(&self) -> f64 {
        self.rs / self.component.len() as f64
    }

    pub fn d_minus_mean(&self) -> f64 {
        self.component.d_minus_total() as f64 / self.component.len() as f64
    }
}

/// One node returned by a reach, before any rejection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReachSample {
    pub node: NodeId,
    /// Index into [`Reacher::components`].
    pub component: usize,
    pub component_size: usize,
    /// Node reachability `rs(v)`.
    pub rs: f64,
    /// `|N(v) ∩ L1|`; zero exactly when `v ∈ L>2`.
    pub d_minus: u32,
    /// Mean of `d-` over the component.
    pub component_d_minus_mean: f64,
    pub bridges_per_node: f64,
}

/// Runs reach attempts against a fixed layering and memoizes explored
/// components, so re-hitting a component costs no further queries in cached
/// mode.
#[derive(Debug, Clone)]
pub struct Reacher {
    config: ReachConfig,
    components: Vec<ReachedComponent>,
    owner: HashMap<NodeId, usize>,
    attempts: u64,
    entries: u64,
}

impl Reacher {
    pub fn new(config: ReachConfig) -> Self {
        Self {
            config,
            components: Vec::new(),
            owner: HashMap::new(),
            attempts: 0,
            entries: 0,
        }
    }

    pub fn config(&self) -> &ReachConfig {
        &self.config
    }

    pub fn components(&self) -> &[ReachedComponent] {
        &self.components
    }

    pub fn component(&self, index: usize) -> &ReachedComponent {
        &self.components[index]
    }

    /// Total first/second-hop attempts so far.
    pub fn attempts(&self) -> u64 {
        self.attempts
    }

    /// Attempts whose second hop landed in `L2`.
    pub fn entries(&self) -> u64 {
        self.entries
    }

    /// Empirical `α`: fraction of attempts that entered the periphery.
    pub fn entry_fraction(&self) -> f64 {
        if self.attempts == 0 {
            0.0
        } else {
            self.entries as f64 / self.attempts as f64
        }
    }

    /// Index of the component containing the `L2` node `v`, exploring and
    /// scoring it on first contact.
    pub fn component_of(
        &mut self,
        session: &mut AccessSession<'_>,
        layering: &Layering,
        v: NodeId,
    ) -> Result<usize> {
        if let Some(&idx) = self.owner.get(&v) {
            if session.counting_mode() == CountingMode::Uncached {
                // nothing is remembered for free: repeat the exploration's queries
                let component = component_bfs(session, layering, v)?;
                self.score(session, layering, &component)?;
            }
            return Ok(idx);
        }
        let component = component_bfs(session, layering, v)?;
        let rs = self.score(session, layering, &component)?;
        let idx = self.components.len();
        for &w in &component.nodes {
            self.owner.insert(w, idx);
        }
        self.components.push(ReachedComponent { component, rs });
        Ok(idx)
    }

    fn score(
        &self,
        session: &mut AccessSession<'_>,
        layering: &Layering,
        component: &Component,
    ) -> Result<f64> {
        match layering.model() {
            QueryModel::Standard => {
                comp_reachability_sl(session, layering, component, self.config.second_hop)
            }
            QueryModel::DegreeRevealing => comp_reachability_plus(component),
        }
    }

    /// Lands on an `L2` node: the standard model draws a uniform `L0`–`L1`
    /// edge and then a second hop out of its `L1` endpoint; the
    /// degree-revealing model draws `u ∈ L1` by plus weight and a uniform
    /// neighbor outside `L0`, retrying when that neighbor is in `L1`.
    fn enter<R: Rng + ?Sized>(
        &mut self,
        session: &mut AccessSession<'_>,
        layering: &Layering,
        rng: &mut R,
    ) -> Result<NodeId> {
        let plus = layering.model() == QueryModel::DegreeRevealing;
        if plus && !layering.has_plus_weights() {
            return Err(Error::InvalidParameter("layering has no plus weights".into()));
        }
        let mut scratch = Vec::new();
        for _ in 0..self.config.attempt_cap {
            let first = if plus {
                layering.sample_plus(rng)
            } else {
                layering.sample_l0l1_edge(rng)
            };
            let Some(u) = first else { break };
            self.attempts += 1;
            let neighbors = session.query(u)?;
            let second_hop = if plus {
                SecondHop::AnyNonL0
            } else {
                self.config.second_hop
            };
            let landed = match second_hop {
                SecondHop::L2Only => {
                    scratch.clear();
                    scratch.extend(neighbors.iter().copied().filter(|&w| !layering.is_core(w)));
                    (!scratch.is_empty()).then(|| scratch[rng.random_range(0..scratch.len())])
                }
                SecondHop::AnyNonL0 => {
                    scratch.clear();
                    scratch.extend(
                        neighbors
                            .iter()
                            .copied()
                            .filter(|&w| layering.classify(w) != crate::layering::Layer::L0),
                    );
                    if scratch.is_empty() {
                        None
                    } else {
                        let w = scratch[rng.random_range(0..scratch.len())];
                        (!layering.is_l1(w)).then_some(w)
                    }
                }
            };
            if let Some(v) = landed {
                self.entries += 1;
                return Ok(v);
            }
        }
        Err(Error::NoPeriphery {
            attempts: self.config.attempt_cap,
        })
    }

    /// One reach: enter the periphery, explore the landed component, and draw
    /// a uniform node from it. No rejection is applied.
    pub fn reach<R: Rng + ?Sized>(
        &mut self,
        session: &mut AccessSession<'_>,
        layering: &Layering,
        rng: &mut R,
    ) -> Result<ReachSample> {
        let landed = self.enter(session, layering, rng)?;
        let idx = self.component_of(session, layering, landed)?;
        let reached = &self.components[idx];
        let pick = rng.random_range(0..reached.component.len());
        Ok(ReachSample {
            node: reached.component.nodes[pick],
            component: idx,
            component_size: reached.component.len(),
            rs: reached.node_rs(),
            d_minus: reached.component.d_minus[pick],
            component_d_minus_mean: reached.d_minus_mean(),
            bridges_per_node: reached.component.bridges_per_node(),
        })
    }
}

/// Convenience wrapper for a single reach with a throwaway cache.
pub fn reach_l2<R: Rng + ?Sized>(
    session: &mut AccessSession<'_>,
    layering: &Layering,
    config: ReachConfig,
    rng: &mut R,
) -> Result<ReachSample> {
    Reacher::new(config).reach(session, layering, rng)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeripherySizeEstimate {
    /// `ℓ̄≥2 = |L1| · d̄1+ / d̄2-`
    pub l2plus_size: f64,
    pub d1_plus_avg: f64,
    pub d2_minus_avg: f64,
    pub s1_used: usize,
    pub s2_used: usize,
}

impl PeripherySizeEstimate {
    pub fn empty(s1_used: usize) -> Self {
        Self {
            l2plus_size: 0.0,
            d1_plus_avg: 0.0,
            d2_minus_avg: 0.0,
            s1_used,
            s2_used: 0,
        }
    }
}

/// Mean number of periphery neighbors over `s1` uniform `L1` nodes (drawn
/// with replacement, each queried).
pub fn estimate_d1_plus<R: Rng + ?Sized>(
    session: &mut AccessSession<'_>,
    layering: &Layering,
    s1: usize,
    rng: &mut R,
) -> Result<f64> {
    let l1 = layering.l1();
    if l1.is_empty() || s1 == 0 {
        return Ok(0.0);
    }
    let mut total = 0u64;
    for _ in 0..s1 {
        let u = l1[rng.random_range(0..l1.len())];
        let neighbors = session.query(u)?;
        total += neighbors.iter().filter(|&&w| !layering.is_core(w)).count() as u64;
    }
    Ok(total as f64 / s1 as f64)
}

/// Importance-weighted mean of `d-` over reach samples: each sample carries
/// weight `1/rs(v)` to undo the reach bias, and contributes its component's
/// mean `d-` (every node of the component was equally likely to be drawn).
pub fn estimate_d2_minus(samples: &[ReachSample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no reach samples".into()));
    }
    let (mut num, mut trs) = (0.0, 0.0);
    for s in samples {
        num += s.component_d_minus_mean / s.rs;
        trs += 1.0 / s.rs;
    }
    Ok(num / trs)
}

/// Estimates `|L>=2|` from `s1` uniform `L1` nodes and `s2` reach samples.
/// Returns the estimate together with the reach samples, which also feed the
/// baseline reachability.
pub fn estimate_periphery_size<R: Rng + ?Sized>(
    session: &mut AccessSession<'_>,
    layering: &Layering,
    reacher: &mut Reacher,
    s1: usize,
    s2: usize,
    rng: &mut R,
) -> Result<(PeripherySizeEstimate, Vec<ReachSample>)> {
    if s1 == 0 || s2 == 0 {
        return Err(Error::InvalidParameter("s1 and s2 must be >= 1".into()));
    }
    let d1_plus_avg = estimate_d1_plus(session, layering, s1, rng)?;
    if d1_plus_avg == 0.0 {
        // either the periphery is empty, or s1 missed every bridge
        return match reacher.reach(session, layering, rng) {
            Err(Error::NoPeriphery { .. }) => Ok((PeripherySizeEstimate::empty(s1), Vec::new())),
            Err(e) => Err(e),
            Ok(_) => Err(Error::Inconsistent(
                "no sampled L1 node has a periphery neighbor, but the periphery was reached".into(),
            )),
        };
    }
    let samples = (0..s2)
        .map(|_| reacher.reach(session, layering, rng))
        .collect::<Result<Vec<_>>>()?;
    let d2_minus_avg = estimate_d2_minus(&samples)?;
    let estimate = PeripherySizeEstimate {
        l2plus_size: layering.l1().len() as f64 * d1_plus_avg / d2_minus_avg,
        d1_plus_avg,
        d2_minus_avg,
        s1_used: s1,
        s2_used: s2,
    };
    Ok((estimate, samples))
}

/// Weighted `ε`-quantile of the sampled node reachabilities, each weighted by
/// `1/rs(v)` so the quantile refers to the node population rather than the
/// reach distribution.
pub fn estimate_baseline_reachability(samples: &[ReachSample], epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} not in (0, 1)")));
    }
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no reach samples".into()));
    }
    let values: Vec<f64> = samples.iter().map(|s| s.rs).collect();
    let weights: Vec<f64> = values.iter().map(|r| 1.0 / r).collect();
    weighted_quantile(&values, &weights, epsilon)
}

/// Structural parameters governing the sampling cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayeringDiagnostics {
    /// Node-weighted mean component size, estimated from reach samples.
    pub mu: f64,
    /// Fraction of reach attempts that entered the periphery.
    pub alpha: f64,
    /// `max rs / rs0` over the samples.
    pub c_ratio: f64,
    /// Mean size of the reached component.
    pub w_expected: f64,
    /// Largest bridges-per-node ratio among reached components.
    pub d_bridge: f64,
    /// Node-average reachability over the minimum observed reachability.
    pub c_rs: f64,
}

pub fn diagnostics(
    reacher: &Reacher,
    samples: &[ReachSample],
    rs0: f64,
) -> Result<LayeringDiagnostics> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("diagnostics need reach samples".into()));
    }
    let trs: f64 = samples.iter().map(|s| 1.0 / s.rs).sum();
    let mu = samples
        .iter()
        .map(|s| s.component_size as f64 / s.rs)
        .sum::<f64>()
        / trs;
    let max_rs = samples.iter().map(|s| s.rs).fold(f64::MIN, f64::max);
    let min_rs = samples.iter().map(|s| s.rs).fold(f64::MAX, f64::min);
    let w_expected =
        samples.iter().map(|s| s.component_size as f64).sum::<f64>() / samples.len() as f64;
    let d_bridge = samples
        .iter()
        .map(|s| s.bridges_per_node)
        .fold(0.0, f64::max);
    // importance-weighted node average of rs is the harmonic mean of the samples
    let rs_node_avg = samples.len() as f64 / trs;
    Ok(LayeringDiagnostics {
        mu,
        alpha: reacher.entry_fraction(),
        c_ratio: max_rs / rs0,
        w_expected,
        d_bridge,
        c_rs: rs_node_avg / min_rs,
    })
}

impl LayeringDiagnostics {
    pub fn to_key_values(&self) -> String {
        format!(
            "mu={:.6}\nalpha={:.6}\nc_ratio={:.6}\nw_expected={:.6}\nd_bridge={:.6}\nc_rs={:.6}\n",
            self.mu, self.alpha, self.c_ratio, self.w_expected, self.d_bridge, self.c_rs
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::CountingMode;
    use crate::generators::{complete, path, star};
    use crate::layering::generate_l0_sl;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(g: &crate::Graph, v0: NodeId, l0: usize) -> (AccessSession<'_>, Layering) {
        let mut s = AccessSession::new(g, QueryModel::Standard, CountingMode::Cached);
        let lay = generate_l0_sl(&mut s, v0, l0, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        (s, lay)
    }

    #[test]
    fn star_reach_is_uniform_over_leaves() {
        let g = star(5).unwrap();
        let (mut s, lay) = setup(&g, 1, 1);
        let mut reacher = Reacher::new(ReachConfig::default());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut counts = [0u32; 6];
        for _ in 0..40_000 {
            let r = reacher.reach(&mut s, &lay, &mut rng).unwrap();
            assert_eq!(r.component_size, 1);
            assert!((r.rs - 0.25).abs() < 1e-12);
            counts[r.node] += 1;
        }
        assert_eq!(counts[0] + counts[1], 0);
        for &c in &counts[2..] {
            assert!((c as f64 / 40_000.0 - 0.25).abs() < 0.01);
        }
        assert_eq!(reacher.entry_fraction(), 1.0);
    }

    #[test]
    fn path_reach_and_size_estimate() {
        let g = path(4).unwrap();
        let (mut s, lay) = setup(&g, 0, 1);
        let mut reacher = Reacher::new(ReachConfig::default());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (est, samples) =
            estimate_periphery_size(&mut s, &lay, &mut reacher, 5, 7, &mut rng).unwrap();
        assert_eq!(est.d1_plus_avg, 1.0);
        assert_eq!(est.d2_minus_avg, 0.5);
        assert_eq!(est.l2plus_size, 2.0);
        assert!(samples.iter().all(|r| (r.rs - 0.5).abs() < 1e-12));
        let diag = diagnostics(&reacher, &samples, 0.5).unwrap();
        assert_eq!(diag.mu, 2.0);
        assert_eq!(diag.alpha, 1.0);
        assert_eq!(diag.d_bridge, 0.5);
        assert_eq!(diag.w_expected, 2.0);
    }

    #[test]
    fn star_size_estimate_is_exact() {
        let g = star(5).unwrap();
        let (mut s, lay) = setup(&g, 1, 1);
        let mut reacher = Reacher::new(ReachConfig::default());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (est, samples) =
            estimate_periphery_size(&mut s, &lay, &mut reacher, 3, 11, &mut rng).unwrap();
        assert_eq!((est.d1_plus_avg, est.d2_minus_avg, est.l2plus_size), (4.0, 1.0, 4.0));
        assert_eq!(estimate_baseline_reachability(&samples, 0.1).unwrap(), 0.25);
        let diag = diagnostics(&reacher, &samples, 0.25).unwrap();
        assert_eq!((diag.mu, diag.alpha, diag.w_expected, diag.d_bridge), (1.0, 1.0, 1.0, 1.0));
        assert_eq!(diag.c_ratio, 1.0);
    }

    #[test]
    fn empty_periphery() {
        let g = complete(3).unwrap();
        let (mut s, lay) = setup(&g, 0, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            reach_l2(&mut s, &lay, ReachConfig::default(), &mut rng),
            Err(Error::NoPeriphery { .. })
        ));
        // L1 non-empty but no bridges: every attempt fails
        let (mut s, lay) = setup(&g, 0, 1);
        let config = ReachConfig {
            attempt_cap: 1000,
            ..Default::default()
        };
        let mut reacher = Reacher::new(config);
        let (est, samples) =
            estimate_periphery_size(&mut s, &lay, &mut reacher, 4, 4, &mut rng).unwrap();
        assert_eq!(est.l2plus_size, 0.0);
        assert!(samples.is_empty());
        assert!(diagnostics(&reacher, &samples, 1.0).is_err());
    }

    #[test]
    fn baseline_examples() {
        let mk = |rs: f64| ReachSample {
            node: 0,
            component: 0,
            component_size: 1,
            rs,
            d_minus: 1,
            component_d_minus_mean: 1.0,
            bridges_per_node: 1.0,
        };
        let samples = [mk(1.0), mk(1.0), mk(2.0)];
        assert_eq!(estimate_baseline_reachability(&samples, 0.5).unwrap(), 1.0);
        assert_eq!(estimate_baseline_reachability(&samples, 1e-9).unwrap(), 1.0);
        assert!(estimate_baseline_reachability(&samples, 0.0).is_err());
        assert!(estimate_baseline_reachability(&samples, 1.0).is_err());
        assert!(estimate_baseline_reachability(&[], 0.5).is_err());
    }

    #[test]
    fn memoized_components_cost_nothing() {
        let g = path(6).unwrap();
        let (mut s, lay) = setup(&g, 0, 1);
        let mut reacher = Reacher::new(ReachConfig::default());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        reacher.reach(&mut s, &lay, &mut rng).unwrap();
        let after_first = s.query_count();
        for _ in 0..50 {
            reacher.reach(&mut s, &lay, &mut rng).unwrap();
        }
        assert_eq!(s.query_count(), after_first);
        assert_eq!(reacher.components().len(), 1);
    }
}
