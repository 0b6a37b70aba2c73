//! Uniform node sampling from large graphs under query access.
//!
//! Sampling algorithms only see the graph through an [`AccessSession`], which
//! bills node queries. The [`exact`] module and interval calibration in
//! [`baselines`] read the raw [`Graph`] and exist for experiments and tests.

pub mod access;
pub mod baselines;
pub mod config;
pub mod error;
pub mod estimators;
pub mod exact;
pub mod experiments;
pub mod generators;
pub mod graph;
pub mod layering;
pub mod sampler;
pub mod stats;

pub use access::{AccessSession, CountingMode, QueryModel};
pub use error::{Error, Result};
pub use graph::{load_edge_list, Graph, NodeId};
pub use layering::{Layer, Layering};
pub use sampler::{preprocess, SampleTrace, SamplerHandle, SamplerParams};
