use thiserror::Error;

/// A dilatation was applied outside the neighbourhoods where it is defined.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("dilatation of scale {eps} based at {base} is undefined at {arg}: {reason}")]
pub struct DomainError {
    pub eps: f64,
    pub base: String,
    pub arg: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Domain(#[from] DomainError),

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("leaf `{0}` has no assigned point")]
    UnassignedLeaf(String),

    #[error("leaf symbol sets differ: {left:?} vs {right:?}")]
    LeafSetMismatch {
        left: Vec<String>,
        right: Vec<String>,
    },

    #[error("evaluating subtree `{subtree}` failed: {source}")]
    TreeEvaluation {
        subtree: String,
        #[source]
        source: DomainError,
    },

    #[error("evaluation failed at scale {eps}: {message}")]
    LimitEvaluation { eps: f64, message: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("inverse map is inaccurate: round trip error {error:e} at {at}")]
    RoundTrip { error: f64, at: String },

    #[error("relation does not contain the basepoint pair")]
    MissingBasepointPair,

    #[error("exhaustive search limited to {limit} total points, got {got}")]
    SizeBound { limit: usize, got: usize },

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("unknown instance `{0}`")]
    UnknownInstance(String),

    #[error("unknown map `{0}`")]
    UnknownMap(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
