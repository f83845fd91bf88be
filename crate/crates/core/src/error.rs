use serde::Serialize;
use thiserror::Error;

use crate::graph::Vertex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report. Variants split into two classes:
/// rejected input (see [`Error::is_internal`] == false) and internal
/// assertion failures, which carry a witness certifying a bug or a
/// violated invariant.
#[derive(Debug, Clone, Error, Serialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("self-loop at vertex {vertex}")]
    SelfLoop { vertex: Vertex },

    #[error("duplicate edge {{{u}, {v}}}")]
    DuplicateEdge { u: Vertex, v: Vertex },

    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: Vertex, n: usize },

    #[error("infeasible parameters: {message}")]
    Infeasible { message: String },

    #[error("coloring does not match graph: {message}")]
    ColoringMismatch { message: String },

    #[error("graph contains a clique on Delta+1 vertices")]
    KDeltaPlusOne { clique: Vec<Vertex> },

    #[error("graph is not dense: {} sparse vertices, {} decomposition violations", sparse.len(), violations.len())]
    NotDense {
        sparse: Vec<Vertex>,
        violations: Vec<String>,
    },

    #[error("loophole enumeration exceeded its work budget ({work} steps)")]
    LoopholeBudget { work: u64 },

    #[error("i/o: {message}")]
    Io { message: String },

    #[error("round cap {cap} exceeded")]
    RoundCapExceeded { cap: usize },

    #[error("node {from} sent a message to non-neighbour {to}")]
    NonNeighborMessage { from: usize, to: usize },

    #[error("virtual groups overlap at vertex {vertex}")]
    OverlappingGroups { vertex: Vertex },

    #[error("hard clique {clique} violates property {property}")]
    HardCliqueProperty {
        clique: usize,
        property: u8,
        witness: Vec<Vertex>,
    },

    #[error("sub-clique {subclique}: vertices {u} and {v} propose to the same target")]
    ProposalCollision {
        subclique: usize,
        u: Vertex,
        v: Vertex,
    },

    #[error("grabbing hypergraph has min degree {min_degree} < rank {rank}")]
    HallViolated { min_degree: usize, rank: usize },

    #[error("no system of distinct representatives found")]
    NoSdr { unassigned: Vec<usize> },

    #[error("matching violated at vertex {vertex}")]
    MatchingViolation {
        vertex: Vertex,
        edges: Vec<(Vertex, Vertex)>,
    },

    #[error("clique {clique} has {outgoing} outgoing edges, need {needed}")]
    TooFewOutgoing {
        clique: usize,
        outgoing: usize,
        needed: usize,
    },

    #[error("clique {clique} has {incoming} incoming edges, bound is strict {bound}")]
    IncomingBound {
        clique: usize,
        incoming: usize,
        bound: f64,
    },

    #[error("slack pair {{{v}, {w}}} of vertex {u} is adjacent")]
    SlackPairAdjacent { u: Vertex, v: Vertex, w: Vertex },

    #[error("slack triads overlap at vertex {vertex}")]
    TriadOverlap { vertex: Vertex },

    #[error("clique {clique} holds {count} slack-pair vertices, bound {bound}")]
    SlackPairCount {
        clique: usize,
        count: usize,
        bound: f64,
    },

    #[error("slack-pair graph node {pair} has degree {degree} > {bound}")]
    VirtualDegree {
        pair: usize,
        degree: usize,
        bound: usize,
        neighbors: Vec<usize>,
    },

    #[error("vertex {vertex} has list of size {list_len} but instance degree {degree}")]
    ListPrecondition {
        vertex: Vertex,
        list_len: usize,
        degree: usize,
    },

    #[error("vertex {vertex} found no free color")]
    EmptyPalette {
        vertex: Vertex,
        neighbor_colors: Vec<u32>,
    },

    #[error("clique {clique} has no uncolored slack source")]
    MissingSlackSource { clique: usize },

    #[error("uncolored vertex {vertex} not covered within depth {depth}")]
    Uncovered { vertex: Vertex, depth: usize },

    #[error("loophole {vertices:?} could not be deg-list colored")]
    DegListFailure { vertices: Vec<Vertex> },

    #[error("split left vertex {vertex} with part degree {part_degree} outside [{low}, {high}]")]
    SplitWindow {
        vertex: usize,
        part_degree: usize,
        low: f64,
        high: f64,
    },

    #[error("oracle search budget exceeded")]
    BudgetExceeded,

    #[error("internal invariant violated: {message}")]
    Invariant { message: String },
}

impl Error {
    /// Internal errors are bug certificates; everything else means the input
    /// was rejected.
    pub fn is_internal(&self) -> bool {
        !matches!(
            self,
            Error::Parse { .. }
                | Error::SelfLoop { .. }
                | Error::DuplicateEdge { .. }
                | Error::VertexOutOfRange { .. }
                | Error::Infeasible { .. }
                | Error::ColoringMismatch { .. }
                | Error::KDeltaPlusOne { .. }
                | Error::NotDense { .. }
                | Error::LoopholeBudget { .. }
                | Error::Io { .. }
        )
    }

    pub(crate) fn invariant(message: impl Into<String>) -> Self {
        Error::Invariant {
            message: message.into(),
        }
    }

    /// JSON witness describing the failure.
    pub fn witness(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).unwrap_or(serde_json::Value::Null);
        if let serde_json::Value::Object(map) = &mut v {
            map.insert("message".into(), self.to_string().into());
        }
        v
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io {
            message: e.to_string(),
        }
    }
}
