//! Topological analysis of single-channel CSMA/CD wireless networks.
//!
//! Nodes with disk-shaped coverage give rise to a link complex (clique
//! complex of the mutual-decodability graph) and an interference complex
//! (Čech complex of the coverage disks). The activation sheaf over either
//! complex describes which nodes may transmit at once; its global sections
//! are exactly the interference-free transmitter sets.
//!
//! Local homology of a cell relative to the complement of its region of
//! influence flags topological pinch points, which [`traffic`] compares
//! against forwarding load from a shortest-path traffic simulator.
//!
//! Geometry is generic over the coordinate type; [`Network`] and
//! [`Node`] fix it to `f64`.

pub mod activation;
mod cliques;
pub mod complex;
pub mod error;
pub mod generate;
pub mod geometry;
pub mod homology;
pub mod io;
pub mod linalg;
pub mod traffic;

pub use activation::{
    active_region, complement_complex, enumerate_global_sections, is_global_section, region_of_influence, restrict,
    stalk, ActiveRegion, Section, Stalk, Value,
};
pub use complex::{build_closure, Cell, CellSet, Complex, VertexId};
pub use error::{Error, Result};
pub use geometry::{interference_complex, link_complex, link_graph, maximal_interference_sets, NetworkModel, NodeGeom};
pub use homology::{
    cohomology_report, lh_field, local_homology, relative_chain_complex, sheaf_cohomology_dims, vector_sheaf_cochain,
    LocalHomologyScore,
};
pub use linalg::BinaryMatrix;
pub use traffic::{
    correlate, forwarding_stats, ingest_trace, simulate, CorrelationConfig, CorrelationReport, ForwardingStats,
    TopRule, TraceRecord,
};

pub type Node = NodeGeom<f64>;
pub type Network = NetworkModel<f64>;
pub type NodeF32 = NodeGeom<f32>;
pub type NetworkF32 = NetworkModel<f32>;
/// Exact scalar for rechecking ranks over the rationals.
pub type Rational = num_rational::BigRational;
