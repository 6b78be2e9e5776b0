//! Detecting and re-weighting cluttering edges in nearly planar graphs.
//!
//! The pipeline: compute per-edge vertex-disjoint-path footprints via a
//! node-splitting max-flow reduction, normalize them to fixed-length
//! feature vectors, flag outlier edges with an Isolation Forest, weight
//! the flagged edges, and lay the graph out with weighted spring
//! engines (a ForceAtlas2-style simulation and stress majorization).
//! Layout quality is scored with crossing/angular/Procrustes metrics
//! and compared across variants with Wilcoxon signed-rank tests.

pub mod experiment;
pub mod flow;
pub mod gen;
pub mod graph;
pub mod iforest;
pub mod layout;
pub mod metrics;
pub mod render;
pub mod stats;
pub mod weighting;

pub use graph::{DistanceMatrix, DistanceMode, Edge, Graph, GraphError, NodeId};
