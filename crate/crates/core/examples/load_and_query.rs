//! Load a SNAP-style edge list and walk through the two query models and the
//! two billing modes.
//!
//! ```bash
//! cargo run --release -p samplayer --example load_and_query -- graph.txt
//! ```
//!
//! Without an argument a small built-in edge list is used.

use std::fs::File;
use std::io::BufReader;

use samplayer::{load_edge_list, AccessSession, CountingMode, QueryModel};

const BUILT_IN: &str = "# toy network\n10 20\n10 30\n20 30\n30 40\n40 50\n";

fn main() -> samplayer::Result<()> {
    let graph = match std::env::args().nth(1) {
        Some(path) => load_edge_list(BufReader::new(File::open(path)?))?,
        None => load_edge_list(BUILT_IN.as_bytes())?,
    };
    println!("nodes={} edges={} average_degree={:.3}", graph.node_count(), graph.edge_count(), graph.average_degree());

    for mode in [CountingMode::Cached, CountingMode::Uncached] {
        let mut session = AccessSession::new(&graph, QueryModel::Standard, mode);
        for v in [0, 1, 0, 2, 0] {
            let neighbors = session.query(v)?;
            let original: Vec<u64> = neighbors.iter().filter_map(|&w| graph.original_id(w)).collect();
            println!("{mode:?}: query node {:?} -> {original:?}", graph.original_id(v));
        }
        println!("{mode:?}: billed={} distinct={}", session.query_count(), session.distinct_queried());
        session.reset_count();
        session.query(0)?;
        println!("{mode:?}: after reset, re-query of a cached node billed={}", session.query_count());
    }

    let mut session = AccessSession::new(&graph, QueryModel::DegreeRevealing, CountingMode::Cached);
    session.query(0)?;
    let revealed: Vec<(usize, Option<usize>)> =
        (0..graph.node_count()).map(|v| (v, session.known_degree(v))).collect();
    println!("degree-revealing: one query of node 0 reveals {revealed:?}");
    Ok(())
}
