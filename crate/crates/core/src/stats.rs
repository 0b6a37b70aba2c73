//! Statistical checks for sample uniformity and a few small helpers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::graph::NodeId;

/// Half the L1 distance between the sample histogram and uniform on `0..n`.
pub fn empirical_tv_to_uniform(samples: &[NodeId], n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("support must be non-empty".into()));
    }
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no samples".into()));
    }
    let mut counts = vec![0u64; n];
    for &s in samples {
        *counts.get_mut(s).ok_or(Error::NodeOutOfRange {
            node: s,
            node_count: n,
        })? += 1;
    }
    Ok(tv_from_counts(&counts, samples.len()))
}

pub(crate) fn tv_from_counts(counts: &[u64], k: usize) -> f64 {
    let uniform = 1.0 / counts.len() as f64;
    let k = k as f64;
    0.5 * counts
        .iter()
        .map(|&c| (c as f64 / k - uniform).abs())
        .sum::<f64>()
}

/// Expected empirical TV distance of `k` truly uniform draws from `0..n`,
/// estimated by simulation. For `k = n` this concentrates near `1/e`.
pub fn uniform_reference_tv(k: usize, n: usize, trials: usize, seed: u64) -> f64 {
    if n <= 1 || k == 0 || trials == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; n];
    let mut total = 0.0;
    for _ in 0..trials {
        counts.iter_mut().for_each(|c| *c = 0);
        for _ in 0..k {
            counts[rng.random_range(0..n)] += 1;
        }
        total += tv_from_counts(&counts, k);
    }
    total / trials as f64
}

/// Pairwise-collision statistic against uniform on `n` items.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionTest {
    pub collisions: u64,
    pub expected: f64,
    pub std_dev: f64,
    pub z: f64,
}

/// Counts pairs `i < j` with equal samples. Under uniformity the pair
/// indicators are pairwise uncorrelated (a shared index gives
/// `P[all three equal] = 1/n² = p²`), so the variance is exactly
/// `C(k,2) · (1/n)(1 - 1/n)`.
pub fn collision_test(samples: &[NodeId], n: usize) -> Result<CollisionTest> {
    if samples.len() < 2 {
        return Err(Error::InvalidParameter("collision test needs k >= 2".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("support must be non-empty".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    let mut collisions = 0u64;
    let mut run = 1u64;
    for i in 1..=sorted.len() {
        if i < sorted.len() && sorted[i] == sorted[i - 1] {
            run += 1;
        } else {
            collisions += run * (run - 1) / 2;
            run = 1;
        }
    }
    let k = samples.len() as f64;
    let pairs = k * (k - 1.0) / 2.0;
    let p = 1.0 / n as f64;
    let expected = pairs * p;
    let std_dev = (pairs * p * (1.0 - p)).sqrt();
    let z = if std_dev > 0.0 {
        (collisions as f64 - expected) / std_dev
    } else {
        0.0
    };
    Ok(CollisionTest {
        collisions,
        expected,
        std_dev,
        z,
    })
}

/// Largest value `v*` such that the weight strictly below `v*` is at most a
/// `q` fraction of the total. Always returns one of the input values.
pub fn weighted_quantile(values: &[f64], weights: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("weighted quantile of nothing".into()));
    }
    if values.len() != weights.len() {
        return Err(Error::InvalidParameter("values and weights differ in length".into()));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!("quantile {q} not in (0, 1)")));
    }
    if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
        return Err(Error::InvalidParameter("weights must be positive".into()));
    }
    let mut pairs: Vec<(f64, f64)> = values.iter().copied().zip(weights.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    let mut below = 0.0;
    let mut answer = pairs[0].0;
    let mut i = 0;
    while i < pairs.len() {
        let value = pairs[i].0;
        if below / total > q {
            break;
        }
        answer = value;
        while i < pairs.len() && pairs[i].0 == value {
            below += pairs[i].1;
            i += 1;
        }
    }
    Ok(answer)
}

/// Pearson chi-square statistic of `counts` against uniform, and its p-value.
pub fn chi_square_uniform(counts: &[u64]) -> Result<(f64, f64)> {
    if counts.len() < 2 {
        return Err(Error::InvalidParameter("chi-square needs >= 2 cells".into()));
    }
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    let statistic: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let dist = ChiSquared::new((counts.len() - 1) as f64).expect("positive dof");
    Ok((statistic, 1.0 - dist.cdf(statistic)))
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidParameter("spearman needs two equal series of length >= 2".into()));
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let mean = (xs.len() as f64 + 1.0) / 2.0;
    let (mut cov, mut vx, mut vy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        cov += (a - mean) * (b - mean);
        vx += (a - mean).powi(2);
        vy += (b - mean).powi(2);
    }
    if vx == 0.0 || vy == 0.0 {
        return Ok(0.0);
    }
    Ok(cov / (vx * vy).sqrt())
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UniformityMethod {
    EmpiricalTv,
    Collisions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniformityReport {
    pub k: usize,
    pub n: usize,
    pub empirical_tv: f64,
    pub reference_tv: f64,
    pub collision_z: f64,
    pub method: UniformityMethod,
    pub zeta: f64,
    pub pass: bool,
}

impl UniformityReport {
    pub fn evaluate(
        samples: &[NodeId],
        n: usize,
        method: UniformityMethod,
        zeta: f64,
        reference_trials: usize,
        seed: u64,
    ) -> Result<Self> {
        let empirical_tv = empirical_tv_to_uniform(samples, n)?;
        let reference_tv = uniform_reference_tv(samples.len(), n, reference_trials, seed);
        let collision_z = collision_test(samples, n)?.z;
        let pass = match method {
            UniformityMethod::EmpiricalTv => (empirical_tv - reference_tv).abs() <= zeta,
            UniformityMethod::Collisions => collision_z <= 3.0,
        };
        Ok(Self {
            k: samples.len(),
            n,
            empirical_tv,
            reference_tv,
            collision_z,
            method,
            zeta,
            pass,
        })
    }

    pub fn to_key_values(&self) -> String {
        format!(
            "k={}\nn={}\nempirical_tv={:.6}\nreference_tv={:.6}\ncollision_z={:.4}\nmethod={}\nzeta={}\npass={}\n",
            self.k,
            self.n,
            self.empirical_tv,
            self.reference_tv,
            self.collision_z,
            match self.method {
                UniformityMethod::EmpiricalTv => "tv",
                UniformityMethod::Collisions => "collisions",
            },
            self.zeta,
            self.pass
        )
    }
}
