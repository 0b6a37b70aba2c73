//! Query access to a graph. Sampling algorithms only ever see the graph
//! through an [`AccessSession`], which bills every node query.

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// What a single node query reveals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QueryModel {
    /// Querying `v` reveals the ids of its neighbors.
    Standard,
    /// Querying `v` additionally reveals the degree of every neighbor.
    DegreeRevealing,
}

/// How repeated queries of the same node are billed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CountingMode {
    /// Each distinct node is billed once.
    #[default]
    Cached,
    /// Every query is billed.
    Uncached,
}

const UNKNOWN: u32 = u32::MAX;

/// Single-owner oracle over a shared immutable [`Graph`].
#[derive(Debug, Clone)]
pub struct AccessSession<'g> {
    graph: &'g Graph,
    model: QueryModel,
    mode: CountingMode,
    queried: Vec<bool>,
    known_degrees: Vec<u32>,
    distinct: usize,
    count: u64,
    lifetime: u64,
}

impl<'g> AccessSession<'g> {
    pub fn new(graph: &'g Graph, model: QueryModel, mode: CountingMode) -> Self {
        let n = graph.node_count();
        Self {
            graph,
            model,
            mode,
            queried: vec![false; n],
            known_degrees: vec![UNKNOWN; n],
            distinct: 0,
            count: 0,
            lifetime: 0,
        }
    }

    pub fn model(&self) -> QueryModel {
        self.model
    }

    pub fn counting_mode(&self) -> CountingMode {
        self.mode
    }

    fn check(&self, v: NodeId) -> Result<()> {
        if v >= self.queried.len() {
            return Err(Error::NodeOutOfRange {
                node: v,
                node_count: self.queried.len(),
            });
        }
        Ok(())
    }

    /// Queries `v` and returns its neighbor list. In the degree-revealing model
    /// the neighbors' degrees become available through [`Self::known_degree`].
    pub fn query(&mut self, v: NodeId) -> Result<&'g [NodeId]> {
        self.check(v)?;
        let first = !self.queried[v];
        if first || self.mode == CountingMode::Uncached {
            self.count += 1;
            self.lifetime += 1;
        }
        let neighbors = self.graph.neighbors(v);
        if first {
            self.queried[v] = true;
            self.distinct += 1;
            self.known_degrees[v] = neighbors.len() as u32;
            if self.model == QueryModel::DegreeRevealing {
                for &w in neighbors {
                    self.known_degrees[w] = self.graph.degree(w) as u32;
                }
            }
        }
        Ok(neighbors)
    }

    /// Degree of `v`, querying it first if the degree is not yet known.
    pub fn degree(&mut self, v: NodeId) -> Result<usize> {
        self.check(v)?;
        match self.known_degree(v) {
            Some(d) => Ok(d),
            None => self.query(v).map(<[NodeId]>::len),
        }
    }

    /// Degree of `v` if some earlier query revealed it. Never bills.
    pub fn known_degree(&self, v: NodeId) -> Option<usize> {
        match self.known_degrees.get(v) {
            Some(&d) if d != UNKNOWN => Some(d as usize),
            _ => None,
        }
    }

    pub fn is_queried(&self, v: NodeId) -> bool {
        self.queried.get(v).copied().unwrap_or(false)
    }

    /// Billed queries since creation or the last [`Self::reset_count`].
    pub fn query_count(&self) -> u64 {
        self.count
    }

    /// Zeroes the counter. The cache of queried nodes survives, so a cached
    /// node stays free after a reset.
    pub fn reset_count(&mut self) {
        self.count = 0;
    }

    /// Billed queries since creation, unaffected by resets.
    pub fn lifetime_count(&self) -> u64 {
        self.lifetime
    }

    /// Number of distinct nodes queried since creation.
    pub fn distinct_queried(&self) -> usize {
        self.distinct
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::star;

    // star(5): center 0, leaves 1..=5
    fn s5() -> Graph {
        star(5).unwrap()
    }

    #[test]
    fn query_star_center() {
        let g = s5();
        let mut s = AccessSession::new(&g, QueryModel::Standard, CountingMode::Cached);
        assert_eq!(s.query_count(), 0);
        assert_eq!(s.query(0).unwrap(), &[1, 2, 3, 4, 5]);
        assert_eq!(s.query_count(), 1);
        s.query(0).unwrap();
        assert_eq!(s.query_count(), 1);
    }

    #[test]
    fn uncached_bills_every_query() {
        let g = s5();
        let mut s = AccessSession::new(&g, QueryModel::Standard, CountingMode::Uncached);
        s.query(0).unwrap();
        s.query(0).unwrap();
        assert_eq!(s.query_count(), 2);
        assert_eq!(s.distinct_queried(), 1);
    }

    #[test]
    fn degree_revealing_records_neighbor_degrees() {
        let g = s5();
        let mut s = AccessSession::new(&g, QueryModel::DegreeRevealing, CountingMode::Cached);
        assert_eq!(s.query(1).unwrap(), &[0]);
        assert_eq!(s.known_degree(0), Some(5));
        assert_eq!(s.degree(0).unwrap(), 5);
        assert_eq!(s.query_count(), 1);
    }

    #[test]
    fn degree_costs_a_query_in_standard_model() {
        let g = s5();
        let mut s = AccessSession::new(&g, QueryModel::Standard, CountingMode::Cached);
        s.query(1).unwrap();
        assert_eq!(s.known_degree(0), None);
        assert_eq!(s.degree(0).unwrap(), 5);
        assert_eq!(s.query_count(), 2);
        assert_eq!(s.degree(0).unwrap(), 5);
        assert_eq!(s.query_count(), 2);
    }

    #[test]
    fn reset_keeps_cache() {
        let g = s5();
        let mut s = AccessSession::new(&g, QueryModel::Standard, CountingMode::Cached);
        for v in [0, 1, 2] {
            s.query(v).unwrap();
        }
        assert_eq!(s.query_count(), 3);
        s.reset_count();
        s.query(1).unwrap();
        assert_eq!(s.query_count(), 0);
        assert_eq!(s.lifetime_count(), 3);
    }

    #[test]
    fn out_of_range() {
        let g = s5();
        let mut s = AccessSession::new(&g, QueryModel::Standard, CountingMode::Cached);
        assert!(matches!(s.query(6), Err(Error::NodeOutOfRange { node: 6, .. })));
        assert!(s.degree(100).is_err());
        assert_eq!(s.query_count(), 0);
    }
}
