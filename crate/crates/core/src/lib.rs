//! Separation profiles, isoperimetric profiles and Cheeger constants on finite windows
//! of infinite graphs, with exact small-scale solvers, certified bounds at larger
//! scale, and evaluable closed-form bounds.

pub mod bounds;
pub mod budget;
pub mod cuts;
pub mod generators;
pub mod graph;
pub mod profiles;
pub mod rational;

pub use graph::{CutResult, Graph, GraphError, VertexId, VertexSet};
pub use rational::Rational;
