use thiserror::Error;

use crate::graph::VertexId;

/// Errors produced by the RDAG library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("vertex id {0} is not a positive integer")]
    InvalidVertexId(u64),

    #[error("vertex {0} is declared more than once")]
    DuplicateVertex(VertexId),

    #[error("edge references undeclared vertex {0}")]
    UnknownVertexReference(VertexId),

    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),

    #[error("duplicate edge {from} -> {to}")]
    DuplicateEdge { from: VertexId, to: VertexId },

    #[error("graph contains a directed cycle: {}", format_cycle(.cycle))]
    CycleDetected { cycle: Vec<VertexId> },

    #[error("colouring is not compatible ({violations} violation(s))")]
    IncompatibleColouring { violations: usize },

    #[error("unknown vertex colour {0:?}")]
    UnknownColour(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid sample matrix: {0}")]
    InvalidSamples(String),

    #[error("maximum likelihood estimate does not exist: top row of colour {colour:?} lies in the span of its parent rows")]
    NoMle { colour: String },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("sample matrix is not polystable (colour {colour:?} is unstable)")]
    NotPolystable { colour: String },

    #[error("missing parameter for colour {0:?}")]
    MissingParameter(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("rank search for colour {colour:?} did not terminate within {limit} samples")]
    RankSearchExhausted { colour: String, limit: usize },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON parse error at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("line {line}: expected {expected} column(s), found {found}")]
    RaggedRows {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}, column {column}: cannot parse {content:?} as a number")]
    NonNumericCell {
        line: usize,
        column: usize,
        content: String,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

fn format_cycle(cycle: &[VertexId]) -> String {
    cycle
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" -> ")
}

pub type Result<T> = std::result::Result<T, Error>;
