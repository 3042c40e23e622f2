use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("edge list line {line}: {kind}")]
    EdgeList { line: usize, kind: EdgeListError },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("eigen-solver did not converge for a {0}x{0} matrix")]
    EigenNonConvergence(usize),

    #[error("matrix is not positive semi-definite (smallest eigenvalue {0:e})")]
    NotPositiveSemidefinite(f64),

    /// The l1/l2 ratio and the subgradient of the l2 norm are undefined at 0.
    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,

    #[error("operation requires an observation mask")]
    MaskRequired,

    #[error("operation is only valid without an observation mask")]
    MaskNotAllowed,

    #[error("step size must be positive, got {0}")]
    NonPositiveStep(f64),

    #[error("zero denominator in recovery error")]
    ZeroDenominator,

    #[error("malformed report: {0}")]
    Report(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EdgeListError {
    #[error("missing header line `n <count>`")]
    MissingHeader,
    #[error("malformed header: {0:?}")]
    BadHeader(String),
    #[error("malformed edge line: {0:?}")]
    Malformed(String),
    #[error("node index {index} out of range for {node_count} nodes")]
    IndexOutOfRange { index: usize, node_count: usize },
    #[error("edge weight must be positive and finite, got {0}")]
    BadWeight(f64),
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("edge ({i}, {j}) listed with conflicting weights {first} and {second}")]
    ConflictingDuplicate {
        i: usize,
        j: usize,
        first: f64,
        second: f64,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
