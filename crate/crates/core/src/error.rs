use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node {node} out of range for graph with {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },

    #[error("operation requires a graph with at least {required} node(s), got {found}")]
    TooFewNodes { required: usize, found: usize },

    #[error("node set is empty")]
    EmptySet,

    #[error("node set over {found} nodes evaluated against a graph with {expected} nodes")]
    UniverseMismatch { expected: usize, found: usize },

    #[error("self-loop at node {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("{what} needs exact enumeration over {nodes} nodes, above the cap of {cap}; use certificates or bounds instead")]
    TooLarge {
        what: &'static str,
        nodes: usize,
        cap: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("no certificate decides {r}-robustness (spectral and isoperimetric bounds too weak, minimum degree does not refute)")]
    Indeterminate { r: usize },

    #[error("eigensolver did not converge after {iterations} iterations (off-diagonal residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("spectrum failed validation: {0}")]
    SpectrumCheck(String),

    #[error("graphs do not differ by exactly one added edge")]
    NotOneEdgeApart,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Whether the error stems from bad input rather than a failed computation.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::NodeOutOfRange { .. }
                | Error::TooFewNodes { .. }
                | Error::EmptySet
                | Error::UniverseMismatch { .. }
                | Error::SelfLoop(_)
                | Error::DuplicateEdge(..)
                | Error::TooLarge { .. }
                | Error::InvalidParameter(_)
                | Error::Precondition(_)
                | Error::Parse { .. }
                | Error::NotOneEdgeApart
                | Error::Json(_)
        )
    }
}
