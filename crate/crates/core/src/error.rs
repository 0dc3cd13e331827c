use thiserror::Error;

/// Errors raised by parsing, validation and the solvers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("vertex {0} is out of range")]
    InvalidVertex(usize),
    #[error("pair map is not an involution at vertex {0}")]
    NotInvolution(usize),
    #[error("edge {0} is a self-loop")]
    SelfLoop(usize),
    #[error("edge {0} has a negative cost")]
    NegativeCost(usize),
    #[error("edge id {0} appears twice")]
    DuplicateEdgeId(usize),
    #[error("unknown edge id {0}")]
    UnknownEdge(usize),
    #[error("vertices {0} and {1} form a pair but are disconnected")]
    Disconnected(usize, usize),
    #[error("parameter {name} is out of range: {value}")]
    Range { name: &'static str, value: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
}

pub type Result<T> = std::result::Result<T, Error>;
