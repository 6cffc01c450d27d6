use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("incomparable solutions: edge universes of size {0} and {1}")]
    IncomparableSolutions(usize, usize),
    #[error("empty solution list")]
    EmptySolutionList,
    #[error("insufficient points: k = {k} but the metric has {n} points")]
    InsufficientPoints { k: usize, n: usize },
    #[error("instance too large for oracle: {0}")]
    OracleTooLarge(String),
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("include set contains a cycle")]
    CyclicInclude,
    #[error("target vertex {0} is unreachable from the source")]
    Unreachable(usize),
    #[error("no path within the budget")]
    NoPathWithinBudget,
    #[error("malformed prefix: {0}")]
    MalformedPrefix(String),
    #[error("include set is dependent in the matroid")]
    DependentInclude,
    #[error("invalid restriction: {0}")]
    InvalidRestriction(String),
    #[error("field modulus {modulus} too small for polynomial degree {degree}")]
    ModulusTooSmall { modulus: u64, degree: usize },
    #[error("fewer than k feasible solutions: found {found}, requested {k}")]
    FewerThanK { found: usize, k: usize },
    #[error("unknown mode: {0}")]
    UnknownMode(String),
    #[error("work cap exceeded: {0}")]
    WorkCapExceeded(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable tag used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::FewerThanK { .. } => "non-existent",
            Error::OracleTooLarge(_) => "oracle-guard",
            Error::Parse { .. } | Error::Io(_) => "input",
            Error::InvalidGraph(_) | Error::InvalidMetric(_) => "input",
            Error::Disconnected | Error::Unreachable(_) => "infeasible-instance",
            _ => "invalid-request",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
