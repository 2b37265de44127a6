//! Community detection and size-stratified quality evaluation for
//! social graphs.
//!
//! The crate provides:
//! - [`graph`]: simple undirected graphs, SNAP edge-list ingestion, and
//!   directed-to-mutual preprocessing;
//! - [`cliques`]: maximal clique enumeration (Bron-Kerbosch with
//!   pivoting and degeneracy ordering) plus a brute-force oracle;
//! - [`caa`]: the Clique Augmentation Algorithm, an overlapping detector
//!   that filters seed cliques by an overlapping threshold and grows
//!   them under a growing threshold;
//! - [`baselines`]: Label Propagation, Multilevel (Louvain) and
//!   FastGreedy (CNM) partitioners, and an import adapter for covers
//!   computed by external tools;
//! - [`metrics`] and [`report`]: extended modularity, TPR, conductance,
//!   internal density, transitivity, desirable coverage, and Dunbar-style
//!   size stratification with CSV/JSON reporting;
//! - [`synthetic`]: seeded generators for benchmarks.

pub mod baselines;
pub mod caa;
pub mod cliques;
pub mod graph;
pub mod metrics;
pub mod report;
pub mod synthetic;

pub use caa::{CaaParams, Community, Cover};
pub use cliques::Clique;
pub use graph::{Graph, NodeId};
pub use metrics::SizeClass;
pub use report::MetricReport;
