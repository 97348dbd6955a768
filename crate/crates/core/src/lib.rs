//! Edge-level Shapley value explanations for node classification with a
//! two-layer GCN.
//!
//! The pipeline for one target node is:
//!
//! 1. [`CompGraph::extract_pruned`] builds the target's computational graph and
//!    drops edges whose messages can never reach the target. Every surviving
//!    directed edge is a player.
//! 2. [`sampler::build_plan`] lays out a mask matrix over all coalition sizes
//!    with complement pairing and per-row weights.
//! 3. [`gcn::batched_masked_predict`] evaluates the explained-class
//!    probability for every coalition, skipping coalitions that leave the
//!    target disconnected.
//! 4. [`solver::solve_wls`] fits the weighted linear surrogate whose
//!    coefficients are the Shapley values.
//!
//! [`explain_node`] runs all four steps. [`metrics`] scores explanations with
//! Fidelity₋ / Fidelity₊, and [`synth`] builds deterministic fixtures.
//!
//! Runnable walkthroughs of each capability live in the crate's `examples/`
//! directory (`cargo run --example explain_node`, ...).

pub mod archive;
pub mod cli;
pub mod combinatorics;
pub mod comp_graph;
mod error;
pub mod explain;
pub mod gcn;
pub mod graph;
pub mod mask;
pub mod metrics;
pub mod rng;
pub mod sampler;
pub mod solver;
pub mod synth;

pub use archive::{DType, Tensor, TensorArchive, TensorData};
pub use comp_graph::{count_reduction, CompGraph, Player};
pub use error::{Error, Result};
pub use explain::{explain_node, ExplainConfig, Explanation, PhaseTimings};
pub use gcn::{GcnModel, LocalGraph, Normalization, PredictionVector};
pub use graph::{FeatureMatrix, Graph};
pub use metrics::FidelityReport;
pub use sampler::{SamplePlan, Strategy};
