use thiserror::Error;

use crate::hypergraph::{EdgeId, ValidationReport, VertexId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(ValidationReport),

    #[error("malformed input at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("infeasible b-matching: vertex {vertex} carries {load} edges but has capacity {capacity}")]
    InfeasibleMatching {
        vertex: VertexId,
        load: usize,
        capacity: u32,
    },

    #[error("unknown edge id {0}")]
    UnknownEdge(EdgeId),

    #[error("unknown vertex id {0}")]
    UnknownVertex(VertexId),

    #[error("enumeration budget exceeded: {edges} edges, cap is {cap}")]
    BudgetExceeded { edges: usize, cap: usize },

    #[error("search gave up after {nodes} nodes")]
    SearchBudgetExceeded { nodes: u64 },

    #[error("dynamic program exceeded its state cap of {cap} entries")]
    StateCapExceeded { cap: usize },

    #[error("instance is not laminar: edges {0} and {1} cross")]
    NotLaminar(EdgeId, EdgeId),

    #[error("certificate rejected: {0}")]
    Certificate(String),

    #[error("vertex {vertex} has capacity {capacity}, this solver requires unit capacities")]
    CapacityNotUnit { vertex: VertexId, capacity: u32 },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("internal consistency error: {0}")]
    InternalConsistency(String),

    #[error("unsupported instance: {0}")]
    Unsupported(String),

    #[error("invalid dual-admission instance: {0}")]
    InvalidUda(String),

    #[error("infeasible assignment: {0}")]
    InfeasibleAssignment(String),

    #[error("invalid formula: {0}")]
    InvalidFormula(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid SMTI instance: {0}")]
    InvalidSmti(String),

    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}
