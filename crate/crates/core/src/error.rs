use thiserror::Error;

/// Errors raised by model construction, solvers and reduction compilers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("gadget must declare at least one state and one location")]
    EmptyGadget,
    #[error("unknown id: {0}")]
    UnknownId(String),
    #[error("duplicate id: {0}")]
    DuplicateId(String),
    #[error("duplicate transition: {0}")]
    DuplicateTransition(String),
    #[error("not a tunnel gadget: {0}")]
    NotTunnelGadget(String),
    #[error("gadget is not a DAG")]
    NotDag,
    #[error("transition not available in the current state: {0}")]
    IllegalTransition(String),
    #[error("agent is not adjacent to the transition's entrance: {0}")]
    AgentNotAdjacent(String),
    #[error("search budget of {0} configurations exceeded")]
    BudgetExceeded(usize),
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("wrong gadget class: {0}")]
    WrongGadgetClass(String),
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("bad degree sequence: {0}")]
    BadDegreeSequence(String),
    #[error("illegal shadow transition: {0}")]
    IllegalShadowTransition(String),
    #[error("not a shadow gadget: {0}")]
    NotShadowGadget(String),
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error("connection {component} holds {count} agents; at most two are supported")]
    TooManyAgentsPerConnection { component: usize, count: usize },
    #[error("unknown reduction: {0}")]
    UnknownReduction(String),
    #[error("unknown gadget: {0}")]
    UnknownGadget(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidInput(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
