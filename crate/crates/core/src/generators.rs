//! Seeded synthetic graph generators.
//!
//! Every generator is a pure function of its parameters and seed; identical
//! inputs always produce identical adjacency.

use std::collections::VecDeque;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Star with center `0` and leaves `1..=k`.
pub fn star(k: usize) -> Result<Graph> {
    if k < 1 {
        return Err(Error::InvalidParameter("star needs at least one leaf".into()));
    }
    Ok(Graph::from_edges(k + 1, (1..=k).map(|leaf| (0, leaf))))
}

/// Path `0 - 1 - ... - (k-1)`.
pub fn path(k: usize) -> Result<Graph> {
    if k < 1 {
        return Err(Error::InvalidParameter("path needs at least one node".into()));
    }
    Ok(Graph::from_edges(k, (1..k).map(|i| (i - 1, i))))
}

pub fn cycle(k: usize) -> Result<Graph> {
    if k < 3 {
        return Err(Error::InvalidParameter("cycle needs at least three nodes".into()));
    }
    Ok(Graph::from_edges(k, (0..k).map(|i| (i, (i + 1) % k))))
}

pub fn complete(k: usize) -> Result<Graph> {
    if k < 1 {
        return Err(Error::InvalidParameter("complete graph needs at least one node".into()));
    }
    Ok(Graph::from_edges(
        k,
        (0..k).flat_map(|u| ((u + 1)..k).map(move |v| (u, v))),
    ))
}

/// Uniform-ish random `d`-regular simple graph via the pairing model: stubs are
/// paired at random, pairs that would create a loop or a parallel edge are
/// rejected, and the whole pairing restarts if it gets stuck.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if d >= n || !(n * d).is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "no simple {d}-regular graph on {n} nodes"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let adjacency = random_regular_adjacency(n, d, &mut rng);
    Ok(Graph::from_edges(
        n,
        adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| (u, v))),
    ))
}

fn random_regular_adjacency<R: Rng>(n: usize, d: usize, rng: &mut R) -> Vec<Vec<NodeId>> {
    'restart: loop {
        let mut adjacency: Vec<Vec<NodeId>> = vec![Vec::with_capacity(d); n];
        let mut stubs: Vec<NodeId> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        while !stubs.is_empty() {
            let mut paired = false;
            for _ in 0..100 {
                let i = rng.random_range(0..stubs.len());
                let j = rng.random_range(0..stubs.len());
                let (u, v) = (stubs[i], stubs[j]);
                if i == j || u == v || adjacency[u].contains(&v) {
                    continue;
                }
                adjacency[u].push(v);
                adjacency[v].push(u);
                let (hi, lo) = if i > j { (i, j) } else { (j, i) };
                stubs.swap_remove(hi);
                stubs.swap_remove(lo);
                paired = true;
                break;
            }
            if !paired {
                let feasible = stubs.iter().enumerate().any(|(i, &u)| {
                    stubs[i + 1..]
                        .iter()
                        .any(|&v| u != v && !adjacency[u].contains(&v))
                });
                if !feasible {
                    continue 'restart;
                }
            }
        }
        return adjacency;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForestFireParams {
    pub n: usize,
    /// Forward burning probability.
    pub p_forward: f64,
    /// Backward burning probability.
    pub p_backward: f64,
    pub seed: u64,
}

impl ForestFireParams {
    pub fn new(n: usize, p_forward: f64, p_backward: f64, seed: u64) -> Self {
        Self {
            n,
            p_forward,
            p_backward,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidParameter("forest fire needs n >= 1".into()));
        }
        for (name, p) in [("p_f", self.p_forward), ("p_b", self.p_backward)] {
            if !(0.0..1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!("{name} = {p} not in [0, 1)")));
            }
        }
        Ok(())
    }
}

/// Number of successes before the first failure, mean `p / (1 - p)`.
fn burn_count<R: Rng>(dist: &Option<Geometric>, rng: &mut R) -> usize {
    dist.as_ref().map_or(0, |g| g.sample(rng) as usize)
}

/// Forest Fire growth. Each new node picks a uniform ambassador, links to it,
/// and then recursively burns: from every burned node `w` it burns a
/// geometric number (mean `p_f/(1-p_f)`) of unburned out-role neighbors of `w`
/// and a geometric number (mean `p_b/(1-p_b)`) of unburned in-role neighbors,
/// linking to each. Orientation is discarded in the returned graph.
pub fn forest_fire(params: &ForestFireParams) -> Result<Graph> {
    params.validate()?;
    let n = params.n;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let geometric = |p: f64| (p > 0.0).then(|| Geometric::new(1.0 - p).expect("p in (0, 1)"));
    let forward = geometric(params.p_forward);
    let backward = geometric(params.p_backward);

    let mut out_links: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    let mut in_links: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    // burned[w] == v marks w as burned by the fire of node v
    let mut burned: Vec<usize> = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    let mut candidates = Vec::new();

    for v in 1..n {
        let ambassador = rng.random_range(0..v);
        burned[ambassador] = v;
        queue.push_back(ambassador);
        let mut links = Vec::new();
        while let Some(w) = queue.pop_front() {
            links.push(w);
            for (role, dist) in [(&out_links[w], &forward), (&in_links[w], &backward)] {
                let want = burn_count(dist, &mut rng);
                if want == 0 {
                    continue;
                }
                candidates.clear();
                candidates.extend(role.iter().copied().filter(|&x| burned[x] != v));
                let take = want.min(candidates.len());
                for i in index::sample(&mut rng, candidates.len(), take) {
                    let x = candidates[i];
                    burned[x] = v;
                    queue.push_back(x);
                }
            }
        }
        for &w in &links {
            out_links[v].push(w);
            in_links[w].push(v);
        }
    }

    Ok(Graph::from_edges(
        n,
        out_links
            .iter()
            .enumerate()
            .flat_map(|(v, list)| list.iter().map(move |&w| (v, w))),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentKind {
    Star,
    Expander,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LowerBoundParams {
    pub n: usize,
    /// Size of each small component, the mixing-time scale.
    pub component_size: usize,
    pub core_degree: usize,
    pub component_kind: ComponentKind,
    pub seed: u64,
}

impl LowerBoundParams {
    pub fn new(n: usize, component_size: usize, seed: u64) -> Self {
        Self {
            n,
            component_size,
            core_degree: 3,
            component_kind: ComponentKind::Star,
            seed,
        }
    }
}

/// An expander core with many small components hanging off it by single
/// bridges.
#[derive(Debug, Clone)]
pub struct LowerBoundGraph {
    pub graph: Graph,
    /// Nodes `0..core_size` form the regular core.
    pub core_size: usize,
    /// Component `i` occupies nodes `component_start(i)..component_start(i) + t`.
    pub component_count: usize,
    pub component_size: usize,
    /// `(w_i, c_i)`: component endpoint and core endpoint of each bridge.
    pub bridges: Vec<(NodeId, NodeId)>,
}

impl LowerBoundGraph {
    pub fn component_start(&self, i: usize) -> NodeId {
        self.core_size + i * self.component_size
    }
}

/// Builds the lower-bound construction: a random `core_degree`-regular core on
/// `n/2` nodes and `n/(2t)` components of size `t`, each bridged to a core
/// node drawn proportionally to core degree. Nodes left over by rounding hang
/// off uniform core nodes.
pub fn lower_bound_graph(params: &LowerBoundParams) -> Result<LowerBoundGraph> {
    let LowerBoundParams {
        n,
        component_size: t,
        core_degree,
        component_kind,
        seed,
    } = *params;
    if t < 2 {
        return Err(Error::InvalidParameter("component size must be >= 2".into()));
    }
    if t > n / 2 {
        return Err(Error::InvalidParameter(format!(
            "component size {t} exceeds n/2 = {}",
            n / 2
        )));
    }
    if core_degree < 3 {
        return Err(Error::InvalidParameter("core degree must be >= 3".into()));
    }
    if component_kind == ComponentKind::Expander && (t < 4 || t % 2 != 0) {
        return Err(Error::InvalidParameter(
            "expander components need an even size >= 4".into(),
        ));
    }
    let core_size = n / 2;
    // regular part of the core; one node short if the degree sum would be odd
    let regular_size = if (core_size * core_degree) % 2 == 0 {
        core_size
    } else {
        core_size - 1
    };
    if core_degree >= regular_size {
        return Err(Error::InvalidParameter(format!(
            "core of {regular_size} nodes cannot be {core_degree}-regular"
        )));
    }
    let component_count = n / (2 * t);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity(n * 2);
    let core = random_regular_adjacency(regular_size, core_degree, &mut rng);
    for (u, list) in core.iter().enumerate() {
        edges.extend(list.iter().filter(|&&v| u < v).map(|&v| (u, v)));
    }
    // proportional-to-degree draw = uniform stub
    let core_stubs: Vec<NodeId> = core
        .iter()
        .enumerate()
        .flat_map(|(u, list)| std::iter::repeat_n(u, list.len()))
        .collect();

    let mut bridges = Vec::with_capacity(component_count);
    for i in 0..component_count {
        let start = core_size + i * t;
        match component_kind {
            ComponentKind::Star => edges.extend((1..t).map(|j| (start, start + j))),
            ComponentKind::Expander => {
                let inner = random_regular_adjacency(t, 3, &mut rng);
                for (u, list) in inner.iter().enumerate() {
                    edges.extend(
                        list.iter()
                            .filter(|&&v| u < v)
                            .map(|&v| (start + u, start + v)),
                    );
                }
            }
        }
        let anchor = core_stubs[rng.random_range(0..core_stubs.len())];
        edges.push((start, anchor));
        bridges.push((start, anchor));
    }

    for extra in (regular_size..core_size).chain(core_size + component_count * t..n) {
        edges.push((extra, rng.random_range(0..regular_size)));
    }

    Ok(LowerBoundGraph {
        graph: Graph::from_edges(n, edges),
        core_size,
        component_count,
        component_size: t,
        bridges,
    })
}
