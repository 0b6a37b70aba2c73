//! Full-knowledge ground truth for a given layering. Reads the raw [`Graph`]
//! directly and therefore belongs to the experiment harness, never to the
//! billed sampling path.

use std::collections::VecDeque;

use crate::access::QueryModel;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::layering::{Layer, Layering, SecondHop};
use crate::stats::weighted_quantile;

/// A `G>=2` component with both reachability scores.
#[derive(Debug, Clone)]
pub struct ExactComponent {
    pub nodes: Vec<NodeId>,
    /// `|N(v) ∩ L1|`, parallel to `nodes`
    pub d_minus: Vec<u32>,
    /// Standard-model `rs(C)` for the decomposition's second-hop rule.
    pub rs_standard: f64,
    /// Number of `L1` edges into the component (degree-revealing `rs(C)`).
    pub bridges: u64,
}

impl ExactComponent {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn rs(&self, model: QueryModel) -> f64 {
        match model {
            QueryModel::Standard => self.rs_standard,
            QueryModel::DegreeRevealing => self.bridges as f64,
        }
    }
}

/// Ground-truth periphery structure under a fixed `L0`/`L1`.
#[derive(Debug, Clone)]
pub struct PeripheryDecomposition {
    node_count: usize,
    l0_size: usize,
    l1_size: usize,
    components: Vec<ExactComponent>,
    owner: Vec<Option<u32>>,
    core: Vec<bool>,
    l2_count: usize,
    /// Periphery nodes with no path to `L1` (disconnected input).
    unreachable: usize,
    d1_plus_avg: f64,
    l0l1_edges: u64,
    plus_total: u64,
    second_hop: SecondHop,
}

/// Decomposes the periphery of `graph` under `layering`.
pub fn decompose(
    graph: &Graph,
    layering: &Layering,
    second_hop: SecondHop,
) -> Result<PeripheryDecomposition> {
    let n = graph.node_count();
    let layer: Vec<Layer> = (0..n).map(|v| layering.classify(v)).collect();
    let d_minus: Vec<u32> = (0..n)
        .map(|v| match layer[v] {
            Layer::Periphery => graph
                .neighbors(v)
                .iter()
                .filter(|&&w| layer[w] == Layer::L1)
                .count() as u32,
            _ => 0,
        })
        .collect();

    let mut owner: Vec<Option<u32>> = vec![None; n];
    let mut components = Vec::new();
    for start in 0..n {
        if layer[start] != Layer::Periphery || d_minus[start] == 0 || owner[start].is_some() {
            continue;
        }
        let idx = components.len() as u32;
        owner[start] = Some(idx);
        let mut nodes = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for &y in graph.neighbors(x) {
                if layer[y] != Layer::Periphery || owner[y].is_some() {
                    continue;
                }
                if d_minus[x] > 0 && d_minus[y] > 0 {
                    continue;
                }
                owner[y] = Some(idx);
                nodes.push(y);
                queue.push_back(y);
            }
        }
        components.push(nodes);
    }

    let hop_choices = |u: NodeId| -> usize {
        graph
            .neighbors(u)
            .iter()
            .filter(|&&w| match second_hop {
                SecondHop::L2Only => layer[w] == Layer::Periphery,
                SecondHop::AnyNonL0 => layer[w] != Layer::L0,
            })
            .count()
    };

    let mut exact = Vec::with_capacity(components.len());
    for nodes in components {
        let mut rs = 0.0;
        let mut bridges = 0u64;
        for &v in &nodes {
            for &u in graph.neighbors(v) {
                if layer[u] != Layer::L1 {
                    continue;
                }
                bridges += 1;
                let d_l0 = layering
                    .d_l0(u)
                    .ok_or_else(|| Error::Inconsistent(format!("{u} classified L1 without d_l0")))?;
                rs += d_l0 as f64 / hop_choices(u) as f64;
            }
        }
        let dm = nodes.iter().map(|&v| d_minus[v]).collect();
        exact.push(ExactComponent {
            nodes,
            d_minus: dm,
            rs_standard: rs,
            bridges,
        });
    }

    let periphery = layer.iter().filter(|&&l| l == Layer::Periphery).count();
    let covered: usize = exact.iter().map(ExactComponent::len).sum();
    let l1 = layering.l1();
    let d1_plus_total: usize = l1
        .iter()
        .map(|&u| {
            graph
                .neighbors(u)
                .iter()
                .filter(|&&w| layer[w] == Layer::Periphery)
                .count()
        })
        .sum();
    let plus_total = l1
        .iter()
        .map(|&u| (graph.degree(u) as u64) - layering.d_l0(u).unwrap_or(0) as u64)
        .sum();

    Ok(PeripheryDecomposition {
        node_count: n,
        l0_size: layering.l0().len(),
        l1_size: l1.len(),
        components: exact,
        owner,
        core: layer.iter().map(|&l| l != Layer::Periphery).collect(),
        l2_count: d_minus.iter().filter(|&&d| d > 0).count(),
        unreachable: periphery - covered,
        d1_plus_avg: if l1.is_empty() {
            0.0
        } else {
            d1_plus_total as f64 / l1.len() as f64
        },
        l0l1_edges: layering.l0l1_edge_total(),
        plus_total,
        second_hop,
    })
}

impl PeripheryDecomposition {
    pub fn components(&self) -> &[ExactComponent] {
        &self.components
    }

    pub fn component_of(&self, v: NodeId) -> Option<usize> {
        self.owner.get(v).copied().flatten().map(|i| i as usize)
    }

    pub fn second_hop(&self) -> SecondHop {
        self.second_hop
    }

    /// `|L>=2|` counting only nodes reachable from `L1`.
    pub fn periphery_size(&self) -> usize {
        self.components.iter().map(ExactComponent::len).sum()
    }

    pub fn l2_size(&self) -> usize {
        self.l2_count
    }

    pub fn unreachable_count(&self) -> usize {
        self.unreachable
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Mean of `|N(u) \ (L0 ∪ L1)|` over `L1`.
    pub fn d1_plus_avg(&self) -> f64 {
        self.d1_plus_avg
    }

    /// Mean of `d-` over `L>=2` (zero for `L>2` nodes).
    pub fn d2_minus_avg(&self) -> f64 {
        let total: u64 = self
            .components
            .iter()
            .flat_map(|c| c.d_minus.iter())
            .map(|&d| d as u64)
            .sum();
        total as f64 / self.periphery_size() as f64
    }

    /// Node-weighted mean component size, `Σ|C|² / Σ|C|`. Zero when empty.
    pub fn mu(&self) -> f64 {
        let size = self.periphery_size();
        if size == 0 {
            return 0.0;
        }
        let sq: f64 = self.components.iter().map(|c| (c.len() as f64).powi(2)).sum();
        sq / size as f64
    }

    pub fn largest_component(&self) -> usize {
        self.components.iter().map(ExactComponent::len).max().unwrap_or(0)
    }

    /// Denominator of the per-attempt hit probability.
    pub fn attempt_total(&self, model: QueryModel) -> f64 {
        match model {
            QueryModel::Standard => self.l0l1_edges as f64,
            QueryModel::DegreeRevealing => self.plus_total as f64,
        }
    }

    /// Probability that one reach attempt lands in component `c`.
    pub fn hit_probability(&self, c: usize, model: QueryModel) -> f64 {
        self.components[c].rs(model) / self.attempt_total(model)
    }

    /// Node reachability `rs(v) = rs(C)/|C|` for periphery nodes.
    pub fn node_rs(&self, v: NodeId, model: QueryModel) -> Option<f64> {
        self.component_of(v).map(|c| {
            let comp = &self.components[c];
            comp.rs(model) / comp.len() as f64
        })
    }

    pub fn min_node_rs(&self, model: QueryModel) -> Option<f64> {
        self.components
            .iter()
            .map(|c| c.rs(model) / c.len() as f64)
            .min_by(f64::total_cmp)
    }

    /// `ε`-quantile of `rs(v)` over periphery nodes.
    pub fn rs_quantile(&self, epsilon: f64, model: QueryModel) -> Result<f64> {
        let values: Vec<f64> = self
            .components
            .iter()
            .map(|c| c.rs(model) / c.len() as f64)
            .collect();
        let weights: Vec<f64> = self.components.iter().map(|c| c.len() as f64).collect();
        weighted_quantile(&values, &weights, epsilon)
    }

    /// Exact output distribution of the layered sampler for a given size
    /// estimate and baseline: core nodes get `1/n̄` each; the periphery gets
    /// `ℓ̄/n̄` split in proportion to `rs(v) · min(1, rs0/rs(v))`. With an
    /// empty periphery the core is uniform.
    pub fn output_distribution(&self, l_bar: f64, rs0: f64, model: QueryModel) -> Vec<f64> {
        let core = (self.l0_size + self.l1_size) as f64;
        let mut p = vec![0.0; self.node_count];
        let mass: f64 = self
            .components
            .iter()
            .map(|c| (c.rs(model) / c.len() as f64).min(rs0) * c.len() as f64)
            .sum();
        let (core_p, periphery_share) = if mass > 0.0 {
            let n_bar = core + l_bar;
            (1.0 / n_bar, l_bar / n_bar)
        } else {
            (1.0 / core, 0.0)
        };
        for (v, pv) in p.iter_mut().enumerate() {
            if self.core[v] {
                *pv = core_p;
            }
        }
        if mass > 0.0 {
            for c in &self.components {
                let w = (c.rs(model) / c.len() as f64).min(rs0);
                for &v in &c.nodes {
                    p[v] = periphery_share * w / mass;
                }
            }
        }
        p
    }
}
