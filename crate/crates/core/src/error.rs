use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph must have at least one node")]
    NoNodes,

    #[error("edge ({src}, {dst}): probability 1 not allowed (infinite hazard)")]
    ProbabilityOne { src: usize, dst: usize },

    #[error("edge ({src}, {dst}): probability {p} outside [0, 1)")]
    ProbabilityOutOfRange { src: usize, dst: usize, p: f64 },

    #[error("edge ({node}, {node}): self-loop")]
    SelfLoop { node: usize },

    #[error("edge ({src}, {dst}): duplicate edge")]
    DuplicateEdge { src: usize, dst: usize },

    #[error("edge ({src}, {dst}): node id out of range for n = {n}")]
    NodeOutOfRange { src: usize, dst: usize, n: usize },

    #[error("influencer set: {0}")]
    InvalidInfluencers(String),

    #[error("hazard matrix is already masked")]
    AlreadyMasked,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("supercritical parameters: (beta/delta)*rho(adjacency) = {0} >= 1")]
    Supercritical(f64),

    #[error("oracle limit: {edges} edge variables exceed the enumeration limit of {limit}")]
    OracleLimit { edges: usize, limit: usize },

    #[error("operation requires a symmetric (undirected) probability matrix")]
    NotSymmetric,

    #[error("uncalibratable: masked adjacency has zero spectral radius")]
    Uncalibratable,

    #[error("infeasible generator parameters: {0}")]
    Infeasible(String),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag, used by the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NoNodes
            | Error::ProbabilityOne { .. }
            | Error::ProbabilityOutOfRange { .. }
            | Error::SelfLoop { .. }
            | Error::DuplicateEdge { .. }
            | Error::NodeOutOfRange { .. } => "invalid_graph",
            Error::InvalidInfluencers(_) => "invalid_influencers",
            Error::AlreadyMasked => "already_masked",
            Error::Parse { .. } => "parse",
            Error::Io { .. } => "io",
            Error::NotConverged { .. } => "not_converged",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Supercritical(_) => "supercritical",
            Error::OracleLimit { .. } => "oracle_limit",
            Error::NotSymmetric => "not_symmetric",
            Error::Uncalibratable => "uncalibratable",
            Error::Infeasible(_) => "infeasible",
            Error::Config { .. } => "config",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
