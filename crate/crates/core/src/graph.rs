//! Immutable undirected simple graphs in compressed adjacency form, plus
//! SNAP-style edge-list ingestion.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

pub type NodeId = usize;

/// Undirected simple graph. Node ids are dense `0..n`, every adjacency list
/// is sorted, and there are no self-loops or parallel edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    /// Original id of each dense node, when the graph came from an edge list.
    original_ids: Option<Vec<u64>>,
}

impl Graph {
    /// Builds a graph on `n` nodes from an arbitrary edge iterator. Self-loops
    /// and duplicate edges are dropped.
    ///
    /// Panics if an endpoint is `>= n`.
    pub fn from_edges<I>(n: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for n = {n}");
            if u == v {
                continue;
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        Self::from_adjacency(adjacency)
    }

    fn from_adjacency(mut adjacency: Vec<Vec<NodeId>>) -> Self {
        let mut offsets = Vec::with_capacity(adjacency.len() + 1);
        offsets.push(0);
        let total: usize = adjacency.iter().map(Vec::len).sum();
        let mut targets = Vec::with_capacity(total);
        for list in adjacency.iter_mut() {
            list.sort_unstable();
            list.dedup();
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        Self {
            offsets,
            targets,
            original_ids: None,
        }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn average_degree(&self) -> f64 {
        if self.node_count() == 0 {
            return 0.0;
        }
        self.targets.len() as f64 / self.node_count() as f64
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Original id of a dense node, if the graph was loaded from an edge list.
    pub fn original_id(&self, v: NodeId) -> Option<u64> {
        self.original_ids.as_ref().map(|ids| ids[v])
    }

    /// True when every node is reachable from node 0.
    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in self.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    /// Writes the graph as a whitespace-separated edge list, one edge per line.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# nodes: {} edges: {}", self.node_count(), self.edge_count())?;
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }
}

/// Reads a SNAP-compatible edge list: one whitespace-separated pair of integer
/// ids per line, `#` comment lines ignored. Ids are remapped to `0..n` in
/// order of first appearance.
pub fn load_edge_list<R: BufRead>(source: R) -> Result<Graph> {
    let mut ids: HashMap<u64, NodeId> = HashMap::new();
    let mut original = Vec::new();
    let mut edges = Vec::new();
    let mut intern = |raw: u64| -> NodeId {
        *ids.entry(raw).or_insert_with(|| {
            original.push(raw);
            original.len() - 1
        })
    };

    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let mut endpoint = || -> Result<u64> {
            let tok = tokens.next().ok_or_else(|| Error::Parse {
                line: line_no,
                message: "expected two node ids".into(),
            })?;
            tok.parse::<u64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("not a node id: {tok:?}"),
            })
        };
        let a = endpoint()?;
        let b = endpoint()?;
        let (a, b) = (intern(a), intern(b));
        edges.push((a, b));
    }

    if original.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut graph = Graph::from_edges(original.len(), edges);
    graph.original_ids = Some(original);
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Graph> {
        load_edge_list(text.as_bytes())
    }

    #[test]
    fn path_on_three_nodes() {
        let g = parse("0 1\n1 2").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn comments_self_loops_and_remapping() {
        let g = parse("# c\n5 5\n5 6").unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.original_id(0), Some(5));
        assert_eq!(g.original_id(1), Some(6));
    }

    #[test]
    fn duplicates_collapse() {
        let g = parse("0 1\n1 0\n0 1").unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (2, 1));
    }

    #[test]
    fn tabs_and_trailing_tokens() {
        let g = parse("10\t20\n20   30 extra\n").unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (3, 2));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        match parse("0 1\n# ok\n1 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("7\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(parse(""), Err(Error::EmptyInput)));
        assert!(matches!(parse("# only comments\n\n"), Err(Error::EmptyInput)));
    }

    #[test]
    fn write_then_reload() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let h = load_edge_list(buf.as_slice()).unwrap();
        assert_eq!(h.node_count(), 4);
        assert_eq!(h.edge_count(), 5);
        let degrees: Vec<_> = (0..4).map(|v| h.degree(v)).collect();
        let mut expected: Vec<_> = (0..4).map(|v| g.degree(v)).collect();
        let mut got = degrees.clone();
        got.sort_unstable();
        expected.sort_unstable();
        assert_eq!(got, expected);
    }
}
