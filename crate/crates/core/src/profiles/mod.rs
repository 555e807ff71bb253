//! Isoperimetric, separation and local separation profiles with their audits.

mod audit;
mod envelope;
mod iso;
mod local;
mod sep;

pub use audit::{
    audit_witnesses, corollary_audit, growth_iso_consistency, lemma_audit, GrowthConsistency, LemmaCheck,
};
pub use envelope::{
    candidate_lower_bound, sep_lower_envelope, CandidateFamily, EnvelopeOptions, EXACT_CANDIDATE_LIMIT,
};
pub use iso::{iso_profile, iso_profile_with, optimal_integers, IsoOptions, IsoResult, OptimalSetRecord};
pub use local::{local_sep, local_sep_with, LocalOptions};
pub use sep::{sep_exact, sep_exact_with, window_symmetry, SepOptions, Symmetry, DEFAULT_SEP_THRESHOLD};

use std::sync::Arc;

use serde::Serialize;

use crate::cuts::CutError;
use crate::graph::{GraphError, VertexSet};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProfileKind {
    Iso,
    Sep,
    LocalSep,
    Growth,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub n: u64,
    #[serde(with = "crate::rational::serde_str")]
    pub value: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Arc<VertexSet>>,
    pub witness_size: Option<u64>,
    pub exact: bool,
    pub ambient_certified: bool,
    /// Local profiles: the container ball may be cut off by the window.
    pub window_limited: bool,
    /// Local profiles: radius of the container ball.
    pub radius: Option<u32>,
    /// The value is the fallback bound rather than a computed candidate.
    pub trivial: bool,
}

impl ProfilePoint {
    pub fn new(n: u64, value: Rational) -> Self {
        ProfilePoint {
            n,
            value,
            witness: None,
            witness_size: None,
            exact: false,
            ambient_certified: false,
            window_limited: false,
            radius: None,
            trivial: false,
        }
    }

    pub(crate) fn with_witness(mut self, w: Arc<VertexSet>) -> Self {
        self.witness_size = Some(w.len() as u64);
        self.witness = Some(w);
        self
    }
}

/// Values indexed by n, in increasing order of n.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileTable {
    pub kind: ProfileKind,
    pub label: String,
    pub points: Vec<ProfilePoint>,
}

impl ProfileTable {
    pub fn new(kind: ProfileKind, label: impl Into<String>) -> Self {
        ProfileTable { kind, label: label.into(), points: Vec::new() }
    }

    pub fn get(&self, n: u64) -> Option<&ProfilePoint> {
        self.points.binary_search_by_key(&n, |p| p.n).ok().map(|i| &self.points[i])
    }

    pub fn value(&self, n: u64) -> Option<Rational> {
        self.get(n).map(|p| p.value)
    }

    pub fn max_n(&self) -> u64 {
        self.points.last().map_or(0, |p| p.n)
    }

    /// Largest n such that every point up to n is exact and ambient-certified.
    pub fn certified_through(&self) -> u64 {
        let mut last = 0;
        for (i, p) in self.points.iter().enumerate() {
            if p.n != i as u64 + 1 || !p.exact || !p.ambient_certified {
                break;
            }
            last = p.n;
        }
        last
    }

    /// Checks the monotonicity the kind requires; returns the first offending n.
    pub fn monotonicity_violation(&self) -> Option<u64> {
        self.points.windows(2).find_map(|w| {
            let bad = match self.kind {
                ProfileKind::Iso => w[1].value > w[0].value,
                _ => w[1].value < w[0].value,
            };
            bad.then_some(w[1].n)
        })
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("enumeration budget of {cap} sets exhausted")]
    BudgetExceeded { cap: u64 },
    #[error("n = {n} is above the exact threshold {threshold}")]
    TooLarge { n: u64, threshold: u64 },
    #[error("profile table is not exact")]
    InexactInput,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Cut(#[from] CutError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
