use thiserror::Error;

/// Errors raised by graph construction, dynamics and the analytic routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("unknown graph family `{0}`")]
    UnknownFamily(String),

    /// A state with `m == 0` or `m == N` was handed to an operation that needs
    /// a transient state.
    #[error("state is absorbing (m = {mutants}, N = {nodes})")]
    AbsorbingState { mutants: usize, nodes: usize },

    #[error("graph has {nodes} nodes, exact solver cap is {cap}")]
    TooLarge { nodes: usize, cap: usize },

    #[error("graph has no reservoir nodes")]
    NoReservoir,

    #[error("operation requires a superstar topology")]
    NotSuperstar,

    /// The forward bias of the reservoir walk is not above one, so the
    /// finite-size bounds carry no information.
    #[error("invalid regime: forward bias gamma = {gamma} <= 1")]
    InvalidRegime { gamma: f64 },

    #[error("linear solver failed: {0}")]
    Solver(String),

    #[error("malformed graph document: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
