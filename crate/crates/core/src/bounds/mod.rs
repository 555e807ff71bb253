//! Closed-form bounds on separation profiles as evaluable objects, the constructive
//! lower bounds built from optimal integers, distortion of embeddings, and fitting of
//! bound shapes against measured profiles.

mod chain;
mod distortion;
mod fit;
mod forms;

pub use chain::{
    audit_chain, chain_lower_bound, chain_lower_bound_symmetric, decay_lower_bound, geometric_decay, ChainAudit,
    ChainWitness,
};
pub use distortion::{distortion, graph_distortion, jv_consistency, DistortionReport, JvReport};
pub use fit::{fit_and_compare, loglog_slope, FitReport, SlopeFit, Verdict};
pub use forms::{evaluate_bound, BoundExpr, BoundForm, Constant, ConstantStatus, Direction, Target};

use crate::profiles::ProfileError;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("precondition not met: {0}")]
    PreconditionGap(String),
    #[error("table not certified: {0}")]
    NotCertified(String),
    #[error("the profile never decays below the requested level within the table")]
    Unreachable,
    #[error("outside the domain of the bound: {0}")]
    DomainError(String),
    #[error("vertices {0} and {1} are mapped to the same point")]
    DegenerateEmbedding(usize, usize),
    #[error("need at least {needed} certified points, found {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("missing parameter '{0}'")]
    MissingParameter(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}
