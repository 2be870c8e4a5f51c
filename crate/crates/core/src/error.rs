use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("duplicate node label `{0}`")]
    DuplicateLabel(String),
    #[error("more than one edge between `{0}` and `{1}`")]
    DuplicateEdge(String, String),
    #[error("self-loop at `{0}`")]
    SelfLoop(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("graph is not chain mixed (contains a semi-directed cycle)")]
    NotChainMixed,
    #[error("graph is not anterial")]
    NotAnterial,
    #[error("graph is not chain-connected")]
    NotChainConnected,
    #[error("graph is not a chain-connected anterial graph")]
    NotChainConnectedAnterial,
    #[error("graph is not a DAG")]
    NotDag,
    #[error("invalid treatment order: {0}")]
    InvalidOrder(String),
    #[error("query sets must be nonempty and pairwise disjoint")]
    OverlappingSets,
    #[error("graph has {n} nodes, above the limit of {limit} for this operation")]
    GraphTooLarge { n: usize, limit: usize },
    #[error("graphs have different node label sets")]
    NodeSetMismatch,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("model violates error independence: its graph is not anterial")]
    NonAnterialResult,
    #[error("intervention values missing for `{0}`")]
    MissingValues(String),
    #[error("covariance is singular on the requested coordinates")]
    SingularCovariance,
    #[error("too few samples: {n} rows for a conditioning set of size {k}")]
    TooFewSamples { n: usize, k: usize },
    #[error("column `{0}` is constant")]
    ConstantColumn(String),
    #[error("labels do not match: `{0}`")]
    LabelMismatch(String),
    #[error("invalid adjustment problem: {0}")]
    InvalidProblem(String),
    #[error("treatment and outcome must be single nodes")]
    SetValuedTreatment,
    #[error("{0} free nodes exceed the exact-check limit")]
    TooLargeForExactCheck(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable name, used in CLI error bodies and FFI messages.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DuplicateLabel(_) => "DuplicateLabel",
            Error::DuplicateEdge(..) => "DuplicateEdge",
            Error::SelfLoop(_) => "SelfLoop",
            Error::UnknownNode(_) => "UnknownNode",
            Error::NotChainMixed => "NotChainMixed",
            Error::NotAnterial => "NotAnterial",
            Error::NotChainConnected => "NotChainConnected",
            Error::NotChainConnectedAnterial => "NotChainConnectedAnterial",
            Error::NotDag => "NotDag",
            Error::InvalidOrder(_) => "InvalidOrder",
            Error::OverlappingSets => "OverlappingSets",
            Error::GraphTooLarge { .. } => "GraphTooLarge",
            Error::NodeSetMismatch => "NodeSetMismatch",
            Error::InvalidModel(_) => "InvalidModel",
            Error::NonAnterialResult => "NonAnterialResult",
            Error::MissingValues(_) => "MissingValues",
            Error::SingularCovariance => "SingularCovariance",
            Error::TooFewSamples { .. } => "TooFewSamples",
            Error::ConstantColumn(_) => "ConstantColumn",
            Error::LabelMismatch(_) => "LabelMismatch",
            Error::InvalidProblem(_) => "InvalidProblem",
            Error::SetValuedTreatment => "SetValuedTreatment",
            Error::TooLargeForExactCheck(_) => "TooLargeForExactCheck",
            Error::Parse(_) => "Parse",
        }
    }
}
