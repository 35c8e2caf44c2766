//! Spectral influence and spectral cyclicality of weighted digraphs.
//!
//! The influence of a vertex set is the relative drop of the Perron root
//! when its rows and columns are deleted; the cyclicality of a graph is the
//! sum of single-vertex influences. On top of these the crate provides
//! divisive, agglomerative and overlapping cyclicality clustering, a
//! brute-force cycle oracle for validation, and CSV/JSON/DOT file formats.

pub mod clustering;
pub mod graph;
pub mod influence;
pub mod ingest;
pub mod oracle;
pub mod spectral;

pub use clustering::{
    agglomerative_cluster, divisive_cluster, overlapping_cluster, ClusterError, ClusterMethod,
    ClusterOptions, Clustering, OverlapClustering,
};
pub use graph::{GraphError, VertexSet, WeightedDigraph};
pub use influence::{
    cyclicality_2x2, influence_of_subset, influence_vector, nonadditivity_witness,
    spectral_cyclicality, InfluenceError, InfluenceReport,
};
pub use spectral::{
    perron_vectors, spectral_radius, spectral_radius_2x2, trace_radius_estimate, PerronPair,
    SpectralError, SpectralOptions, SpectralResult,
};
