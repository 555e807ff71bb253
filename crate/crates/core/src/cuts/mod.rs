//! Cheeger constants: exact values for small graphs, certified intervals beyond.
//!
//! Every operation treats the input graph itself as the set F; callers holding a subset
//! of a larger window pass `induced_subgraph(window, F)`.

mod exact;
mod flow;
mod shell;
mod spectral;

pub use exact::{cheeger_exact, cheeger_exact_with, DEFAULT_EXACT_THRESHOLD, GRAY_CODE_LIMIT};
pub(crate) use exact::min_connected_cut;
pub use flow::{flow_lower_bound, flow_lower_bound_refined, FlowCertificate};
pub use shell::{ball_shell_cut, doubling_shell_search, DoublingReport, ShellReport};
pub use spectral::{
    certify_lambda2_above, cheeger_sweep, cheeger_sweep_with, fiedler_vector, sweep_cut, SweepConfig,
};

use serde::Serialize;

use crate::graph::{CutResult, GraphError};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CutMethod {
    Exact,
    SpectralSweep,
    BallShell,
    DoublingShell,
}

/// Which certificate produced `lo`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LowerSource {
    /// Equal to the exact value.
    Exact,
    /// Half a certified lower bound on the second Laplacian eigenvalue.
    Spectral,
    /// Shortest-path multicommodity flow congestion.
    Flow,
    /// One boundary edge for every part of a connected graph: 1/⌊|F|/2⌋.
    Trivial,
    /// Zero: the graph is disconnected or has one vertex.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CutFlag {
    /// |F| = 1: the minimum ranges over an empty family and h is taken to be 0.
    SingleVertex,
    /// F is disconnected; h = 0 with the smallest component as witness.
    Disconnected,
    /// The eigenvector came from a capped iteration; the sweep is still a valid cut.
    EigenApproximate,
    /// The shell cutter had no admissible radius above 0.
    Degenerate,
}

/// Certified bracket lo ≤ h(F) ≤ hi with a cut attaining hi.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheegerInterval {
    #[serde(with = "crate::rational::serde_str")]
    pub lo: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub hi: Rational,
    pub witness: CutResult,
    pub method: CutMethod,
    pub lo_source: LowerSource,
    pub flags: Vec<CutFlag>,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum CutError {
    #[error("graph has {size} vertices, above the exact threshold {threshold}")]
    TooLarge { size: usize, threshold: usize },
    #[error("graph is empty")]
    Empty,
    #[error("graph is not connected")]
    Disconnected,
    #[error("vertex {0} out of range")]
    InvalidVertex(u32),
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Lower bound 1/⌊n/2⌋ for connected graphs on n ≥ 2 vertices.
pub fn trivial_lower_bound(n: usize) -> Rational {
    if n < 2 {
        Rational::from_integer(0)
    } else {
        Rational::new(1, (n / 2) as i128)
    }
}

/// The larger of two (value, source) pairs, keeping the first on ties.
pub(crate) fn better_lower(a: (Rational, LowerSource), b: (Rational, LowerSource)) -> (Rational, LowerSource) {
    if b.0 > a.0 {
        b
    } else {
        a
    }
}
