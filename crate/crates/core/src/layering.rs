//! Structural decomposition: the greedy base layer `L0`, its neighborhood
//! `L1`, and exploration of the periphery `L>=2` one component at a time.
//!
//! The periphery graph `G>=2` keeps only edges with at least one endpoint at
//! distance `>= 3` from `L0`. Edges between two `L2` nodes are ignored so that
//! components stay as small as possible.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use rand::Rng;
use rand_distr::weighted::WeightedIndex;
use rand_distr::Distribution;

use crate::access::{AccessSession, QueryModel};
use crate::error::{Error, Result};
use crate::graph::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layer {
    L0,
    L1,
    Periphery,
}

/// How the second hop of a standard-model reach attempt is drawn from the
/// `L1` endpoint `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SecondHop {
    /// Uniform over `N(u) \ (L0 ∪ L1)`; attempts fail only when that set is empty.
    #[default]
    L2Only,
    /// Uniform over `N(u) \ L0`; landing back in `L1` fails the attempt.
    AnyNonL0,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    L0,
    L1(usize),
}

/// Result of greedy base-layer generation together with the sampling
/// structures built over the `L0`–`L1` edges.
#[derive(Debug, Clone)]
pub struct Layering {
    model: QueryModel,
    target_size: usize,
    l0: Vec<NodeId>,
    l1: Vec<NodeId>,
    slots: HashMap<NodeId, Slot>,
    /// `|N(u) ∩ L0|`, parallel to `l1`
    d_l0: Vec<u32>,
    edge_total: u64,
    /// `deg(u) - |N(u) ∩ L0|`, parallel to `l1`; degree-revealing only
    plus_weights: Option<Vec<u32>>,
    plus_total: u64,
    edge_index: Option<WeightedIndex<u64>>,
    plus_index: Option<WeightedIndex<u64>>,
}

impl Layering {
    fn assemble(
        model: QueryModel,
        target_size: usize,
        l0: Vec<NodeId>,
        l1: Vec<NodeId>,
        d_l0: Vec<u32>,
        plus_weights: Option<Vec<u32>>,
    ) -> Result<Self> {
        let mut slots = HashMap::with_capacity(l0.len() + l1.len());
        for &v in &l0 {
            if slots.insert(v, Slot::L0).is_some() {
                return Err(Error::Snapshot(format!("node {v} listed twice")));
            }
        }
        for (i, &u) in l1.iter().enumerate() {
            if slots.insert(u, Slot::L1(i)).is_some() {
                return Err(Error::Snapshot(format!("node {u} listed twice")));
            }
        }
        if d_l0.len() != l1.len() || d_l0.contains(&0) {
            return Err(Error::Snapshot("every L1 node needs an L0 neighbor".into()));
        }
        let edge_total = d_l0.iter().map(|&d| d as u64).sum();
        let edge_index = (edge_total > 0)
            .then(|| WeightedIndex::new(d_l0.iter().map(|&d| d as u64)).expect("positive weights"));
        let (plus_total, plus_index) = match &plus_weights {
            Some(w) => {
                if w.len() != l1.len() {
                    return Err(Error::Snapshot("plus weights do not match L1".into()));
                }
                let total: u64 = w.iter().map(|&x| x as u64).sum();
                let index = (total > 0)
                    .then(|| WeightedIndex::new(w.iter().map(|&x| x as u64)).expect("weights"));
                (total, index)
            }
            None => (0, None),
        };
        Ok(Self {
            model,
            target_size,
            l0,
            l1,
            slots,
            d_l0,
            edge_total,
            plus_weights,
            plus_total,
            edge_index,
            plus_index,
        })
    }

    pub fn model(&self) -> QueryModel {
        self.model
    }

    /// Requested `|L0|`. Generation stops early when `L1` runs dry.
    pub fn target_size(&self) -> usize {
        self.target_size
    }

    /// `L0` in insertion order.
    pub fn l0(&self) -> &[NodeId] {
        &self.l0
    }

    pub fn l1(&self) -> &[NodeId] {
        &self.l1
    }

    /// Membership lookup; never queries.
    pub fn classify(&self, v: NodeId) -> Layer {
        match self.slots.get(&v) {
            Some(Slot::L0) => Layer::L0,
            Some(Slot::L1(_)) => Layer::L1,
            None => Layer::Periphery,
        }
    }

    pub fn is_l1(&self, v: NodeId) -> bool {
        matches!(self.slots.get(&v), Some(Slot::L1(_)))
    }

    pub fn is_core(&self, v: NodeId) -> bool {
        self.slots.contains_key(&v)
    }

    /// `|N(u) ∩ L0|` for `u ∈ L1`.
    pub fn d_l0(&self, u: NodeId) -> Option<u32> {
        match self.slots.get(&u) {
            Some(&Slot::L1(i)) => Some(self.d_l0[i]),
            _ => None,
        }
    }

    /// `d+(L0)`, the number of edges between `L0` and `L1`.
    pub fn l0l1_edge_total(&self) -> u64 {
        self.edge_total
    }

    /// `deg(u) - |N(u) ∩ L0|` for `u ∈ L1`, degree-revealing layerings only.
    pub fn plus_weight(&self, u: NodeId) -> Option<u32> {
        match (self.slots.get(&u), &self.plus_weights) {
            (Some(&Slot::L1(i)), Some(w)) => Some(w[i]),
            _ => None,
        }
    }

    pub fn has_plus_weights(&self) -> bool {
        self.plus_weights.is_some()
    }

    /// `W`, the number of (directed) edges from `L1` to `L1 ∪ L2`.
    pub fn plus_weight_total(&self) -> u64 {
        self.plus_total
    }

    /// `L1` endpoint of a uniform `L0`–`L1` edge. Free: `L0` was fully queried.
    pub fn sample_l0l1_edge<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<NodeId> {
        self.edge_index.as_ref().map(|idx| self.l1[idx.sample(rng)])
    }

    /// `u ∈ L1` with probability proportional to its plus weight.
    pub fn sample_plus<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<NodeId> {
        self.plus_index.as_ref().map(|idx| self.l1[idx.sample(rng)])
    }

    /// Text snapshot: `key=value` lines with space-separated node lists.
    pub fn to_snapshot(&self) -> String {
        let join = |xs: &mut dyn Iterator<Item = String>| xs.collect::<Vec<_>>().join(" ");
        let mut out = String::from("# samplayer layering snapshot v1\n");
        let model = match self.model {
            QueryModel::Standard => "standard",
            QueryModel::DegreeRevealing => "degree-revealing",
        };
        let _ = writeln!(out, "model={model}");
        let _ = writeln!(out, "target_size={}", self.target_size);
        let _ = writeln!(out, "l0_size={}", self.l0.len());
        let _ = writeln!(out, "l1_size={}", self.l1.len());
        let _ = writeln!(out, "l0l1_edge_total={}", self.edge_total);
        let _ = writeln!(out, "l0={}", join(&mut self.l0.iter().map(|v| v.to_string())));
        let _ = writeln!(out, "l1={}", join(&mut self.l1.iter().map(|v| v.to_string())));
        let _ = writeln!(out, "d_l0={}", join(&mut self.d_l0.iter().map(|v| v.to_string())));
        if let Some(w) = &self.plus_weights {
            let _ = writeln!(out, "plus_weight_total={}", self.plus_total);
            let _ = writeln!(out, "plus_weights={}", join(&mut w.iter().map(|v| v.to_string())));
        }
        out
    }

    pub fn from_snapshot(text: &str) -> Result<Self> {
        let mut fields: HashMap<&str, &str> = HashMap::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Snapshot(format!("expected key=value, got {line:?}")))?;
            fields.insert(k.trim(), v.trim());
        }
        let get = |k: &str| {
            fields
                .get(k)
                .copied()
                .ok_or_else(|| Error::Snapshot(format!("missing key {k}")))
        };
        fn list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
            s.split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Snapshot(format!("bad number {t:?}"))))
                .collect()
        }
        fn number<T: std::str::FromStr>(s: &str) -> Result<T> {
            s.parse().map_err(|_| Error::Snapshot(format!("bad number {s:?}")))
        }
        let model = match get("model")? {
            "standard" => QueryModel::Standard,
            "degree-revealing" => QueryModel::DegreeRevealing,
            other => return Err(Error::Snapshot(format!("unknown model {other:?}"))),
        };
        let plus_weights = match fields.get("plus_weights") {
            Some(s) => Some(list(s)?),
            None => None,
        };
        let layering = Self::assemble(
            model,
            number(get("target_size")?)?,
            list(get("l0")?)?,
            list(get("l1")?)?,
            list(get("d_l0")?)?,
            plus_weights,
        )?;
        let expected: u64 = number(get("l0l1_edge_total")?)?;
        if expected != layering.edge_total {
            return Err(Error::Snapshot(format!(
                "l0l1_edge_total {expected} disagrees with d_l0 sum {}",
                layering.edge_total
            )));
        }
        Ok(layering)
    }
}

/// Max-bucket priority queue with uniform tie-breaking among the top bucket.
#[derive(Debug, Default)]
struct BucketQueue {
    buckets: Vec<Vec<NodeId>>,
    position: HashMap<NodeId, (usize, usize)>,
    top: usize,
}

impl BucketQueue {
    fn insert(&mut self, v: NodeId, key: usize) {
        if self.buckets.len() <= key {
            self.buckets.resize_with(key + 1, Vec::new);
        }
        self.position.insert(v, (key, self.buckets[key].len()));
        self.buckets[key].push(v);
        self.top = self.top.max(key);
    }

    fn remove(&mut self, v: NodeId) -> Option<usize> {
        let (key, idx) = self.position.remove(&v)?;
        let bucket = &mut self.buckets[key];
        bucket.swap_remove(idx);
        if let Some(&moved) = bucket.get(idx) {
            self.position.insert(moved, (key, idx));
        }
        Some(key)
    }

    fn key(&self, v: NodeId) -> Option<usize> {
        self.position.get(&v).map(|&(k, _)| k)
    }

    fn pop_max<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<NodeId> {
        if self.position.is_empty() {
            return None;
        }
        while self.buckets[self.top].is_empty() {
            self.top -= 1;
        }
        let bucket = &self.buckets[self.top];
        let v = bucket[rng.random_range(0..bucket.len())];
        self.remove(v);
        Some(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct L0Options {
    /// Length of an optional simple random walk from `v0` whose endpoint seeds
    /// the greedy growth. Walk queries are billed.
    pub warmup_steps: usize,
}

/// Greedy `L0` growth for the standard model: repeatedly move the `L1` node
/// with the most `L0` neighbors into `L0`. Issues exactly one query per `L0`
/// node.
pub fn generate_l0_sl<R: Rng + ?Sized>(
    session: &mut AccessSession<'_>,
    v0: NodeId,
    target: usize,
    rng: &mut R,
) -> Result<Layering> {
    grow_l0(session, v0, target, Greedy::L0Neighbors, rng)
}

/// Greedy `L0` growth for the degree-revealing model: the `L1` node of largest
/// true degree moves into `L0` each round.
pub fn generate_l0_plus<R: Rng + ?Sized>(
    session: &mut AccessSession<'_>,
    v0: NodeId,
    target: usize,
    rng: &mut R,
) -> Result<Layering> {
    if session.model() != QueryModel::DegreeRevealing {
        return Err(Error::InvalidParameter(
            "degree-based L0 growth needs a degree-revealing session".into(),
        ));
    }
    grow_l0(session, v0, target, Greedy::Degree, rng)
}

/// Model-appropriate greedy growth, optionally after a warm-up walk.
pub fn generate_l0<R: Rng + ?Sized>(
    session: &mut AccessSession<'_>,
    v0: NodeId,
    target: usize,
    options: &L0Options,
    rng: &mut R,
) -> Result<Layering> {
    let mut seed = v0;
    for _ in 0..options.warmup_steps {
        let neighbors = session.query(seed)?;
        if neighbors.is_empty() {
            break;
        }
        seed = neighbors[rng.random_range(0..neighbors.len())];
    }
    match session.model() {
        QueryModel::Standard => generate_l0_sl(session, seed, target, rng),
        QueryModel::DegreeRevealing => generate_l0_plus(session, seed, target, rng),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Greedy {
    L0Neighbors,
    Degree,
}

fn grow_l0<R: Rng + ?Sized>(
    session: &mut AccessSession<'_>,
    v0: NodeId,
    target: usize,
    rule: Greedy,
    rng: &mut R,
) -> Result<Layering> {
    if target < 1 {
        return Err(Error::InvalidParameter("L0 size must be >= 1".into()));
    }
    let mut in_l0: HashMap<NodeId, ()> = HashMap::new();
    let mut l0 = Vec::with_capacity(target);
    // L1 membership with |N(u) ∩ L0|, in first-seen order
    let mut l1_count: HashMap<NodeId, u32> = HashMap::new();
    let mut l1_order: Vec<NodeId> = Vec::new();
    let mut queue = BucketQueue::default();

    let mut next = Some(v0);
    while let Some(u) = next {
        let neighbors = session.query(u)?;
        in_l0.insert(u, ());
        l0.push(u);
        if l1_count.remove(&u).is_some() {
            queue.remove(u);
        }
        for &w in neighbors {
            if in_l0.contains_key(&w) {
                continue;
            }
            let count = l1_count.entry(w).or_insert_with(|| {
                l1_order.push(w);
                0
            });
            *count += 1;
            let key = match rule {
                Greedy::L0Neighbors => *count as usize,
                Greedy::Degree => session
                    .known_degree(w)
                    .expect("degree-revealing query exposes neighbor degrees"),
            };
            if queue.key(w) != Some(key) {
                queue.remove(w);
                queue.insert(w, key);
            }
        }
        next = if l0.len() < target { queue.pop_max(rng) } else { None };
    }

    let l1: Vec<NodeId> = l1_order.into_iter().filter(|u| l1_count.contains_key(u)).collect();
    let d_l0: Vec<u32> = l1.iter().map(|u| l1_count[u]).collect();
    let plus_weights = match session.model() {
        QueryModel::DegreeRevealing => Some(
            l1.iter()
                .zip(&d_l0)
                .map(|(&u, &d)| {
                    let degree = session.known_degree(u).expect("revealed by an L0 query");
                    degree as u32 - d
                })
                .collect(),
        ),
        QueryModel::Standard => None,
    };
    Layering::assemble(session.model(), target, l0, l1, d_l0, plus_weights)
}

/// A connected component of `G>=2` with its `L1` boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    /// Component nodes in BFS order from the seed.
    pub nodes: Vec<NodeId>,
    /// `|N(v) ∩ L1|` for each entry of `nodes`; positive exactly on `L2`.
    pub d_minus: Vec<u32>,
    /// `(u, e(u, C))` for every `u ∈ L1` adjacent to the component, sorted by `u`.
    pub boundary: Vec<(NodeId, u32)>,
    /// Total number of `L1`–component edges.
    pub bridge_count: u64,
}

impl Component {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn l2_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .zip(&self.d_minus)
            .filter(|(_, &d)| d > 0)
            .map(|(&v, _)| v)
    }

    /// Sum of `d-(v)` over the component.
    pub fn d_minus_total(&self) -> u64 {
        self.d_minus.iter().map(|&d| d as u64).sum()
    }

    /// Largest number of bridges per node, `bridge_count / |C|`.
    pub fn bridges_per_node(&self) -> f64 {
        self.bridge_count as f64 / self.len() as f64
    }
}

fn l1_neighbor_count(layering: &Layering, neighbors: &[NodeId]) -> u32 {
    neighbors.iter().filter(|&&w| layering.is_l1(w)).count() as u32
}

/// Explores the `G>=2` component of an `L2` node. Every component node is
/// queried, and each periphery neighbor is queried once to decide whether it is
/// in `L2`. An edge is traversed only if at least one endpoint lies in `L>2`.
pub fn component_bfs(
    session: &mut AccessSession<'_>,
    layering: &Layering,
    v: NodeId,
) -> Result<Component> {
    if layering.is_core(v) {
        return Err(Error::NotInPeriphery {
            node: v,
            reason: "node is in L0 or L1",
        });
    }
    let seed_neighbors = session.query(v)?;
    let seed_d_minus = l1_neighbor_count(layering, seed_neighbors);
    if seed_d_minus == 0 {
        return Err(Error::NotInPeriphery {
            node: v,
            reason: "node has no L1 neighbor",
        });
    }

    // d-(y) for every periphery node classified so far
    let mut d_minus_of: HashMap<NodeId, u32> = HashMap::from([(v, seed_d_minus)]);
    let mut member: HashMap<NodeId, ()> = HashMap::from([(v, ())]);
    let mut boundary: HashMap<NodeId, u32> = HashMap::new();
    let mut nodes = vec![v];
    let mut d_minus = vec![seed_d_minus];
    let mut frontier = VecDeque::from([v]);

    while let Some(x) = frontier.pop_front() {
        let x_in_l2 = d_minus_of[&x] > 0;
        let neighbors = session.query(x)?;
        for &y in neighbors {
            match layering.classify(y) {
                Layer::L0 => {}
                Layer::L1 => *boundary.entry(y).or_insert(0) += 1,
                Layer::Periphery => {
                    if member.contains_key(&y) {
                        continue;
                    }
                    let y_d_minus = match d_minus_of.get(&y) {
                        Some(&d) => d,
                        None => {
                            let d = l1_neighbor_count(layering, session.query(y)?);
                            d_minus_of.insert(y, d);
                            d
                        }
                    };
                    if x_in_l2 && y_d_minus > 0 {
                        continue;
                    }
                    member.insert(y, ());
                    nodes.push(y);
                    d_minus.push(y_d_minus);
                    frontier.push_back(y);
                }
            }
        }
    }

    let mut boundary: Vec<(NodeId, u32)> = boundary.into_iter().collect();
    boundary.sort_unstable();
    let bridge_count = boundary.iter().map(|&(_, e)| e as u64).sum();
    Ok(Component {
        nodes,
        d_minus,
        boundary,
        bridge_count,
    })
}

/// Standard-model component reachability
/// `rs(C) = Σ_u d_L0(u) · e(u, C) / h(u)`, where `h(u)` is the size of the
/// second-hop candidate set of `u`. The per-attempt probability that a reach
/// attempt lands in `C` is `rs(C) / d+(L0)`.
pub fn comp_reachability_sl(
    session: &mut AccessSession<'_>,
    layering: &Layering,
    component: &Component,
    second_hop: SecondHop,
) -> Result<f64> {
    if component.boundary.is_empty() {
        return Err(Error::UnreachableComponent);
    }
    let mut rs = 0.0;
    for &(u, e) in &component.boundary {
        let d_l0 = layering
            .d_l0(u)
            .ok_or_else(|| Error::Inconsistent(format!("boundary node {u} is not in L1")))?;
        let hop_choices = second_hop_choices(session, layering, u, second_hop)?;
        rs += d_l0 as f64 * e as f64 / hop_choices as f64;
    }
    Ok(rs)
}

/// Number of candidates for the second hop out of `u ∈ L1`.
pub(crate) fn second_hop_choices(
    session: &mut AccessSession<'_>,
    layering: &Layering,
    u: NodeId,
    second_hop: SecondHop,
) -> Result<usize> {
    let neighbors = session.query(u)?;
    Ok(match second_hop {
        SecondHop::L2Only => neighbors.iter().filter(|&&w| !layering.is_core(w)).count(),
        SecondHop::AnyNonL0 => neighbors
            .iter()
            .filter(|&&w| layering.classify(w) != Layer::L0)
            .count(),
    })
}

/// Degree-revealing component reachability: the number of `L1` edges entering
/// the component. The per-attempt hit probability is `rs(C) / W`. Free.
pub fn comp_reachability_plus(component: &Component) -> Result<f64> {
    if component.boundary.is_empty() {
        return Err(Error::UnreachableComponent);
    }
    Ok(component.bridge_count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::CountingMode;
    use crate::generators::{complete, path, star};
    use crate::graph::Graph;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(3)
    }

    fn std_session(g: &Graph) -> AccessSession<'_> {
        AccessSession::new(g, QueryModel::Standard, CountingMode::Cached)
    }

    fn plus_session(g: &Graph) -> AccessSession<'_> {
        AccessSession::new(g, QueryModel::DegreeRevealing, CountingMode::Cached)
    }

    /// x(0) - u(1), u - a(2), u - b(3), a - b
    fn kite() -> Graph {
        Graph::from_edges(4, [(0, 1), (1, 2), (1, 3), (2, 3)])
    }

    fn sorted(mut v: Vec<NodeId>) -> Vec<NodeId> {
        v.sort_unstable();
        v
    }

    #[test]
    fn star_from_leaf() {
        let g = star(5).unwrap();
        let mut s = std_session(&g);
        let lay = generate_l0_sl(&mut s, 1, 2, &mut rng()).unwrap();
        assert_eq!(lay.l0(), &[1, 0]);
        assert_eq!(sorted(lay.l1().to_vec()), vec![2, 3, 4, 5]);
        assert!((2..=5).all(|u| lay.d_l0(u) == Some(1)));
        assert_eq!(lay.l0l1_edge_total(), 4);
        assert_eq!(s.query_count(), 2);
        assert_eq!(lay.classify(0), Layer::L0);
        assert_eq!(lay.classify(3), Layer::L1);
    }

    #[test]
    fn path_single_node_base() {
        let g = path(4).unwrap();
        let mut s = std_session(&g);
        let lay = generate_l0_sl(&mut s, 0, 1, &mut rng()).unwrap();
        assert_eq!(lay.l0(), &[0]);
        assert_eq!(lay.l1(), &[1]);
        assert_eq!(lay.l0l1_edge_total(), 1);
        assert_eq!(lay.classify(3), Layer::Periphery);
    }

    #[test]
    fn exhausted_triangle() {
        let g = complete(3).unwrap();
        let mut s = std_session(&g);
        let lay = generate_l0_sl(&mut s, 2, 3, &mut rng()).unwrap();
        assert_eq!(sorted(lay.l0().to_vec()), vec![0, 1, 2]);
        assert!(lay.l1().is_empty());
        assert_eq!(lay.l0l1_edge_total(), 0);
        // asking for more than exists stops early
        let mut s = std_session(&g);
        let lay = generate_l0_sl(&mut s, 0, 10, &mut rng()).unwrap();
        assert_eq!(lay.l0().len(), 3);
        assert_eq!(lay.target_size(), 10);
    }

    #[test]
    fn plus_prefers_true_degree() {
        // v0(0) - u(1), v0 - w(2), u - x(3), w - y1..y9 (4..=12)
        let mut edges = vec![(0, 1), (0, 2), (1, 3)];
        edges.extend((4..=12).map(|y| (2, y)));
        let g = Graph::from_edges(13, edges);
        for seed in 0..20 {
            let mut s = plus_session(&g);
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            let lay = generate_l0_plus(&mut s, 0, 2, &mut r).unwrap();
            assert_eq!(lay.l0(), &[0, 2]);
            assert_eq!(lay.plus_weight(1), Some(1));
            assert_eq!(lay.plus_weight(4), Some(0));
        }
        // the standard rule sees a tie and picks either
        let picks: std::collections::HashSet<_> = (0..40)
            .map(|seed| {
                let mut s = std_session(&g);
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                generate_l0_sl(&mut s, 0, 2, &mut r).unwrap().l0()[1]
            })
            .collect();
        assert_eq!(picks, [1, 2].into_iter().collect());
    }

    #[test]
    fn plus_on_star_and_path() {
        let g = star(5).unwrap();
        let mut s = plus_session(&g);
        let lay = generate_l0_plus(&mut s, 1, 2, &mut rng()).unwrap();
        assert_eq!(lay.l0(), &[1, 0]);
        let g = path(4).unwrap();
        let mut s = plus_session(&g);
        let lay = generate_l0_plus(&mut s, 0, 2, &mut rng()).unwrap();
        assert_eq!(lay.l0(), &[0, 1]);
        let mut s = std_session(&g);
        assert!(generate_l0_plus(&mut s, 0, 2, &mut rng()).is_err());
    }

    #[test]
    fn plus_weights_on_star_leaf_base() {
        let g = star(5).unwrap();
        let mut s = plus_session(&g);
        let lay = generate_l0_plus(&mut s, 1, 1, &mut rng()).unwrap();
        assert_eq!(lay.l1(), &[0]);
        assert_eq!(lay.plus_weight(0), Some(4));
        assert_eq!(lay.plus_weight_total(), 4);
    }

    #[test]
    fn bfs_on_path() {
        let g = path(4).unwrap();
        let mut s = std_session(&g);
        let lay = generate_l0_sl(&mut s, 0, 1, &mut rng()).unwrap();
        let c = component_bfs(&mut s, &lay, 2).unwrap();
        assert_eq!(c.nodes, vec![2, 3]);
        assert_eq!(c.l2_nodes().collect::<Vec<_>>(), vec![2]);
        assert_eq!(c.boundary, vec![(1, 1)]);
        assert_eq!(c.d_minus, vec![1, 0]);
        let rs = comp_reachability_sl(&mut s, &lay, &c, SecondHop::L2Only).unwrap();
        assert!((rs - 1.0).abs() < 1e-12);
        assert_eq!(comp_reachability_plus(&c).unwrap(), 1.0);
    }

    #[test]
    fn bfs_ignores_l2_l2_edges() {
        let g = kite();
        let mut s = std_session(&g);
        let lay = generate_l0_sl(&mut s, 0, 1, &mut rng()).unwrap();
        let c = component_bfs(&mut s, &lay, 2).unwrap();
        assert_eq!(c.nodes, vec![2]);
        assert_eq!(c.boundary, vec![(1, 1)]);
        let rs = comp_reachability_sl(&mut s, &lay, &c, SecondHop::L2Only).unwrap();
        assert!((rs - 0.5).abs() < 1e-12);
        // the retry-on-L1 reading has the same denominator here
        let rs = comp_reachability_sl(&mut s, &lay, &c, SecondHop::AnyNonL0).unwrap();
        assert!((rs - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bfs_star_singletons() {
        let g = star(5).unwrap();
        let mut s = std_session(&g);
        let lay = generate_l0_sl(&mut s, 1, 1, &mut rng()).unwrap();
        let c = component_bfs(&mut s, &lay, 2).unwrap();
        assert_eq!(c.nodes, vec![2]);
        let rs = comp_reachability_sl(&mut s, &lay, &c, SecondHop::L2Only).unwrap();
        assert!((rs - 0.25).abs() < 1e-12);
        assert_eq!(comp_reachability_plus(&c).unwrap(), 1.0);
    }

    #[test]
    fn bfs_rejects_core_and_deep_nodes() {
        let g = path(5).unwrap();
        let mut s = std_session(&g);
        let lay = generate_l0_sl(&mut s, 0, 1, &mut rng()).unwrap();
        assert!(matches!(
            component_bfs(&mut s, &lay, 1),
            Err(Error::NotInPeriphery { .. })
        ));
        assert!(matches!(
            component_bfs(&mut s, &lay, 4),
            Err(Error::NotInPeriphery { .. })
        ));
    }

    #[test]
    fn component_without_boundary_is_unreachable() {
        let c = Component {
            nodes: vec![7],
            d_minus: vec![0],
            boundary: vec![],
            bridge_count: 0,
        };
        assert!(matches!(comp_reachability_plus(&c), Err(Error::UnreachableComponent)));
        let g = star(3).unwrap();
        let mut s = std_session(&g);
        let lay = generate_l0_sl(&mut s, 0, 1, &mut rng()).unwrap();
        assert!(matches!(
            comp_reachability_sl(&mut s, &lay, &c, SecondHop::L2Only),
            Err(Error::UnreachableComponent)
        ));
    }

    #[test]
    fn snapshot_round_trip() {
        let g = star(6).unwrap();
        for mut s in [std_session(&g), plus_session(&g)] {
            let lay = generate_l0(&mut s, 2, 2, &L0Options::default(), &mut rng()).unwrap();
            let text = lay.to_snapshot();
            let back = Layering::from_snapshot(&text).unwrap();
            assert_eq!(back.l0(), lay.l0());
            assert_eq!(back.l1(), lay.l1());
            assert_eq!(back.l0l1_edge_total(), lay.l0l1_edge_total());
            assert_eq!(back.plus_weight_total(), lay.plus_weight_total());
            assert_eq!(back.to_snapshot(), text);
        }
        assert!(Layering::from_snapshot("model=standard\n").is_err());
        let broken = "model=standard\ntarget_size=1\nl0=0\nl1=1\nd_l0=1\nl0l1_edge_total=5\n";
        assert!(Layering::from_snapshot(broken).is_err());
    }

    #[test]
    fn warmup_walk_bills_queries() {
        let g = path(10).unwrap();
        let mut s = std_session(&g);
        let opts = L0Options { warmup_steps: 4 };
        let lay = generate_l0(&mut s, 0, 1, &opts, &mut rng()).unwrap();
        assert_eq!(lay.l0().len(), 1);
        assert!(s.query_count() >= 2);
    }
}
