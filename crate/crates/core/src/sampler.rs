//! The layered sampler: a preprocessing phase that builds the base layer and
//! estimates the periphery, followed by cheap repeated sampling.

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::access::AccessSession;
use crate::error::{Error, Result};
use crate::estimators::{
    estimate_baseline_reachability, estimate_periphery_size, PeripherySizeEstimate, ReachConfig,
    ReachSample, Reacher,
};
use crate::graph::NodeId;
use crate::layering::{generate_l0, L0Options, Layer, Layering};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerParams {
    pub l0_size: usize,
    pub s1: usize,
    pub s2: usize,
    pub epsilon: f64,
    pub reach: ReachConfig,
    pub l0_options: L0Options,
}

impl SamplerParams {
    pub fn new(l0_size: usize) -> Self {
        Self {
            l0_size,
            s1: 3000,
            s2: 200,
            epsilon: 0.1,
            reach: ReachConfig::default(),
            l0_options: L0Options::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.l0_size == 0 {
            return Err(Error::InvalidParameter("l0_size must be >= 1".into()));
        }
        if self.s1 == 0 || self.s2 == 0 {
            return Err(Error::InvalidParameter("s1 and s2 must be >= 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon {} not in (0, 1)",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// One accepted sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleTrace {
    pub node: NodeId,
    pub layer: Layer,
    /// Billed queries issued while producing this sample.
    pub queries_spent: u64,
    /// Reach results rejected before acceptance.
    pub rejections: u64,
}

/// Preprocessed state supporting repeated [`SamplerHandle::sample`] calls.
#[derive(Debug, Clone)]
pub struct SamplerHandle {
    layering: Layering,
    estimate: PeripherySizeEstimate,
    rs0: f64,
    epsilon: f64,
    n_bar: f64,
    reacher: Reacher,
    reach_samples: Vec<ReachSample>,
    preprocessing_queries: u64,
    rng: ChaCha8Rng,
}

/// Builds the base layer, estimates the periphery size and the baseline
/// reachability. All preprocessing queries go through `session`.
pub fn preprocess(
    session: &mut AccessSession<'_>,
    v0: NodeId,
    params: &SamplerParams,
    seed: u64,
) -> Result<SamplerHandle> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let before = session.query_count();
    let layering = generate_l0(session, v0, params.l0_size, &params.l0_options, &mut rng)?;
    let mut reacher = Reacher::new(params.reach);
    let (estimate, reach_samples) = if layering.l1().is_empty() {
        (PeripherySizeEstimate::empty(0), Vec::new())
    } else {
        estimate_periphery_size(
            session,
            &layering,
            &mut reacher,
            params.s1,
            params.s2,
            &mut rng,
        )?
    };
    let rs0 = if reach_samples.is_empty() {
        1.0
    } else {
        estimate_baseline_reachability(&reach_samples, params.epsilon)?
    };
    let mut handle = SamplerHandle::from_parts(
        layering,
        estimate,
        rs0,
        params.epsilon,
        reacher,
        rng.random(),
    )?;
    handle.reach_samples = reach_samples;
    handle.preprocessing_queries = session.query_count() - before;
    Ok(handle)
}

impl SamplerHandle {
    /// Assembles a handle from externally supplied parts, e.g. exact
    /// ground-truth values in a test harness.
    pub fn from_parts(
        layering: Layering,
        estimate: PeripherySizeEstimate,
        rs0: f64,
        epsilon: f64,
        reacher: Reacher,
        seed: u64,
    ) -> Result<Self> {
        if !(rs0 > 0.0 && rs0.is_finite()) {
            return Err(Error::InvalidParameter(format!("rs0 must be positive, got {rs0}")));
        }
        if !(estimate.l2plus_size >= 0.0 && estimate.l2plus_size.is_finite()) {
            return Err(Error::InvalidParameter("periphery size estimate must be finite and >= 0".into()));
        }
        let n_bar = (layering.l0().len() + layering.l1().len()) as f64 + estimate.l2plus_size;
        Ok(Self {
            layering,
            estimate,
            rs0,
            epsilon,
            n_bar,
            reacher,
            reach_samples: Vec::new(),
            preprocessing_queries: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn layering(&self) -> &Layering {
        &self.layering
    }

    pub fn estimate(&self) -> &PeripherySizeEstimate {
        &self.estimate
    }

    pub fn rs0(&self) -> f64 {
        self.rs0
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn n_bar(&self) -> f64 {
        self.n_bar
    }

    pub fn reacher(&self) -> &Reacher {
        &self.reacher
    }

    /// Reach samples collected while estimating the periphery.
    pub fn reach_samples(&self) -> &[ReachSample] {
        &self.reach_samples
    }

    pub fn preprocessing_queries(&self) -> u64 {
        self.preprocessing_queries
    }

    /// Draws one node. `L0`/`L1` draws cost nothing; a periphery draw
    /// repeats reach-and-accept until a node is accepted with probability
    /// `min(1, rs0/rs(v))`.
    pub fn sample(&mut self, session: &mut AccessSession<'_>) -> Result<SampleTrace> {
        let before = session.query_count();
        let l0 = self.layering.l0().len() as f64;
        let l1 = self.layering.l1().len() as f64;
        let mut periphery_weight = self.estimate.l2plus_size;
        let mut rejections = 0u64;
        loop {
            let x = self.rng.random::<f64>() * (l0 + l1 + periphery_weight);
            if x < l0 {
                let v = self.layering.l0()[self.rng.random_range(0..self.layering.l0().len())];
                return Ok(self.trace(v, Layer::L0, session, before, rejections));
            }
            if x < l0 + l1 || periphery_weight == 0.0 {
                let v = self.layering.l1()[self.rng.random_range(0..self.layering.l1().len())];
                return Ok(self.trace(v, Layer::L1, session, before, rejections));
            }
            loop {
                match self.reacher.reach(session, &self.layering, &mut self.rng) {
                    Ok(r) => {
                        if r.rs <= self.rs0 || self.rng.random::<f64>() < self.rs0 / r.rs {
                            return Ok(self.trace(r.node, Layer::Periphery, session, before, rejections));
                        }
                        rejections += 1;
                    }
                    Err(Error::NoPeriphery { attempts }) => {
                        warn!("periphery unreachable after {attempts} attempts; renormalizing over L0 and L1");
                        periphery_weight = 0.0;
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }

    fn trace(
        &self,
        node: NodeId,
        layer: Layer,
        session: &AccessSession<'_>,
        before: u64,
        rejections: u64,
    ) -> SampleTrace {
        SampleTrace {
            node,
            layer,
            queries_spent: session.query_count() - before,
            rejections,
        }
    }

    /// Draws `n` samples and tracks cumulative billed queries after each one.
    pub fn sample_many(&mut self, session: &mut AccessSession<'_>, n: usize) -> Result<SampleRun> {
        if n == 0 {
            return Err(Error::InvalidParameter("number of samples must be >= 1".into()));
        }
        let mut traces = Vec::with_capacity(n);
        let mut cumulative = Vec::with_capacity(n);
        let mut total = 0u64;
        for _ in 0..n {
            let t = self.sample(session)?;
            total += t.queries_spent;
            traces.push(t);
            cumulative.push(total);
        }
        Ok(SampleRun {
            traces,
            cumulative,
            preprocessing_queries: self.preprocessing_queries,
        })
    }
}

/// Output of [`SamplerHandle::sample_many`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRun {
    pub traces: Vec<SampleTrace>,
    /// Sampling-phase queries after each sample, preprocessing excluded.
    pub cumulative: Vec<u64>,
    pub preprocessing_queries: u64,
}

impl SampleRun {
    pub fn nodes(&self) -> Vec<NodeId> {
        self.traces.iter().map(|t| t.node).collect()
    }

    /// Cumulative queries after sample `i` (0-based) with preprocessing folded in.
    pub fn cumulative_folded(&self, i: usize) -> u64 {
        self.cumulative[i] + self.preprocessing_queries
    }

    /// Amortized queries per sample after `i + 1` samples, preprocessing folded in.
    pub fn amortized_folded(&self, i: usize) -> f64 {
        self.cumulative_folded(i) as f64 / (i + 1) as f64
    }

    /// Amortized sampling-phase queries per sample after `i + 1` samples.
    pub fn amortized_sampling(&self, i: usize) -> f64 {
        self.cumulative[i] as f64 / (i + 1) as f64
    }

    pub fn total_queries(&self) -> u64 {
        self.cumulative.last().copied().unwrap_or(0) + self.preprocessing_queries
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::{CountingMode, QueryModel};
    use crate::generators::{complete, path, star};

    fn params(l0: usize) -> SamplerParams {
        SamplerParams {
            s1: 20,
            s2: 20,
            epsilon: 0.01,
            ..SamplerParams::new(l0)
        }
    }

    #[test]
    fn star_handle_has_exact_estimates() {
        let g = star(5).unwrap();
        let mut s = AccessSession::new(&g, QueryModel::Standard, CountingMode::Cached);
        let h = preprocess(&mut s, 1, &params(1), 7).unwrap();
        assert_eq!(h.n_bar(), 6.0);
        assert_eq!(h.rs0(), 0.25);
        assert_eq!(h.preprocessing_queries(), s.query_count());
    }

    #[test]
    fn star_samples_are_uniform() {
        let g = star(5).unwrap();
        let mut s = AccessSession::new(&g, QueryModel::Standard, CountingMode::Cached);
        let mut h = preprocess(&mut s, 1, &params(1), 7).unwrap();
        let run = h.sample_many(&mut s, 60_000).unwrap();
        let mut counts = [0u32; 6];
        for t in &run.traces {
            counts[t.node] += 1;
            if t.layer != Layer::Periphery {
                assert_eq!(t.queries_spent, 0);
            }
        }
        for c in counts {
            assert!((c as f64 / 60_000.0 - 1.0 / 6.0).abs() < 0.008, "{counts:?}");
        }
        assert_eq!(run.total_queries(), s.query_count());
    }

    #[test]
    fn path_and_plus_model() {
        let g = path(4).unwrap();
        for model in [QueryModel::Standard, QueryModel::DegreeRevealing] {
            let mut s = AccessSession::new(&g, model, CountingMode::Cached);
            let mut h = preprocess(&mut s, 0, &params(1), 3).unwrap();
            assert_eq!(h.n_bar(), 4.0);
            let run = h.sample_many(&mut s, 40_000).unwrap();
            let mut counts = [0u32; 4];
            for v in run.nodes() {
                counts[v] += 1;
            }
            for c in counts {
                assert!((c as f64 / 40_000.0 - 0.25).abs() < 0.01, "{model:?} {counts:?}");
            }
        }
    }

    #[test]
    fn whole_graph_in_l0() {
        let g = complete(4).unwrap();
        let mut s = AccessSession::new(&g, QueryModel::Standard, CountingMode::Cached);
        let mut h = preprocess(&mut s, 0, &params(10), 1).unwrap();
        assert_eq!(h.n_bar(), 4.0);
        let run = h.sample_many(&mut s, 100).unwrap();
        assert!(run.traces.iter().all(|t| t.layer == Layer::L0));
        assert!(h.sample_many(&mut s, 0).is_err());
    }

    #[test]
    fn amortized_series() {
        let run = SampleRun {
            traces: Vec::new(),
            cumulative: vec![0, 4, 4],
            preprocessing_queries: 8,
        };
        assert_eq!(run.amortized_folded(0), 8.0);
        assert_eq!(run.amortized_folded(2), 4.0);
        assert_eq!(run.amortized_sampling(1), 2.0);
        assert_eq!(run.total_queries(), 12);
    }

    #[test]
    fn rejects_bad_parts() {
        let g = star(3).unwrap();
        let mut s = AccessSession::new(&g, QueryModel::Standard, CountingMode::Cached);
        let h = preprocess(&mut s, 1, &params(1), 0).unwrap();
        let bad = SamplerHandle::from_parts(
            h.layering().clone(),
            *h.estimate(),
            0.0,
            0.1,
            Reacher::new(ReachConfig::default()),
            0,
        );
        assert!(bad.is_err());
        assert!(preprocess(&mut s, 1, &SamplerParams { epsilon: 1.0, ..params(1) }, 0).is_err());
    }
}
