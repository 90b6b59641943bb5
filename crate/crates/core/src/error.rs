use thiserror::Error;

/// Errors raised by graph construction, propagation and evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("node {node} out of range (node count {node_count})")]
    NodeOutOfRange { node: usize, node_count: usize },

    #[error("edge ({u}, {v}) has invalid weight {weight}; weights must be finite and non-negative")]
    InvalidWeight { u: usize, v: usize, weight: f64 },

    #[error("self-loop on node {node}")]
    SelfLoop { node: usize },

    #[error("duplicate undirected edge ({u}, {v})")]
    DuplicateEdge { u: usize, v: usize },

    #[error("graphs disagree on node count ({left} vs {right})")]
    NodeCountMismatch { left: usize, right: usize },

    #[error("expected {expected} entries, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid distribution ({q1}, {q2})")]
    InvalidDistribution { q1: f64, q2: f64 },

    #[error("no labeled nodes")]
    NoLabeledNodes,

    #[error("NAC undefined: {0}")]
    NacUndefined(String),

    #[error("NAC-based gamma not usable (N_S = {n_s}, N_D = {n_d}); fall back to cross-validation")]
    FallbackRequired { n_s: f64, n_d: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("only one class present: {0}")]
    SingleClass(String),

    #[error("exhaustive search over {count} unlabeled nodes exceeds the limit of {max}")]
    TooManyUnlabeled { count: usize, max: usize },

    #[error("every cross-validation fold was skipped")]
    AllFoldsSkipped,
}

impl Error {
    /// True for quantities that are mathematically undefined on the given input
    /// (as opposed to malformed input).
    pub fn is_undefined_quantity(&self) -> bool {
        matches!(self, Error::NacUndefined(_) | Error::FallbackRequired { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
