use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MecError {
    #[error("self-loop on vertex `{0}`")]
    SelfLoop(String),
    #[error("conflicting edge between `{0}` and `{1}`")]
    ConflictingEdge(String, String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("graph contains directed edges where an undirected graph is required")]
    DirectedEdgesPresent,
    #[error("graph is not chordal")]
    NotChordal,
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph is not a DAG: {0}")]
    NotADag(String),
    #[error("vertex sets differ")]
    VertexMismatch,
    #[error("inconsistent orientation: {0}")]
    InconsistentOrientation(String),
    #[error("invalid essential graph: {0}")]
    InvalidEssentialGraph(String),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("malformed hypothesis: {0}")]
    MalformedHypothesis(String),
    #[error("hypothesis is not realizable")]
    Unrealizable,
    #[error("enumeration limit of {0} members exceeded")]
    LimitExceeded(usize),
    #[error("empty sample")]
    EmptySample,
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, MecError>;
