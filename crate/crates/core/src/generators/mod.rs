//! Finite windows of lattices, Cayley graphs, pre-fractal carpets and percolation clusters.
//!
//! Every generator numbers vertices in lexicographic order of their canonical key, so
//! outputs are reproducible and `cayley_ball(FreeAbelian(d), R)` coincides with
//! `lattice_window(d, R)` vertex for vertex.

mod carpet;
mod cayley;
mod lattice;
mod percolation;

pub use carpet::{sierpinski_carpet, CarpetInfo, CarpetPattern};
pub use cayley::{cayley_ball, GroupSpec};
pub use lattice::{l1_ball_size, lattice_window};
pub use percolation::{edge_coin, percolation_cluster, PercolationConfig, PercolationStats};

use crate::graph::GraphError;

/// Default cap on generated vertex counts.
pub const DEFAULT_VERTEX_CAP: u64 = 20_000_000;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum GenError {
    #[error("window would have {size} vertices, above the cap {cap}")]
    SizeOverflow { size: u64, cap: u64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("largest open cluster is a single vertex")]
    EmptyCluster,
    #[error(transparent)]
    Graph(#[from] GraphError),
}
