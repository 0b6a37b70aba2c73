use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("edge list is empty")]
    EmptyInput,

    #[error("node {node} out of range (graph has {node_count} nodes)")]
    NodeOutOfRange { node: NodeId, node_count: usize },

    #[error("node {0} has no neighbors")]
    IsolatedNode(NodeId),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("node {node} is not a valid component seed: {reason}")]
    NotInPeriphery { node: NodeId, reason: &'static str },

    #[error("component has no L1 boundary and cannot be reached")]
    UnreachableComponent,

    #[error("periphery not reached after {attempts} attempts (entry fraction is effectively zero)")]
    NoPeriphery { attempts: u64 },

    #[error("inconsistent estimate: {0}")]
    Inconsistent(String),

    #[error("no sampling interval up to {cap} steps met the criterion (best distance {best:.4})")]
    CalibrationFailed { cap: usize, best: f64 },

    #[error("{0}")]
    Config(String),

    #[error("malformed layering snapshot: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
