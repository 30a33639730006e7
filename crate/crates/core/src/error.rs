use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while building, parsing or transforming hypergraphs.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("uniformity mismatch: {left} vs {right}")]
    UniformityMismatch { left: usize, right: usize },
    #[error("uniformity must be at least 1")]
    ZeroUniformity,
    #[error("at most {max} vertices are supported, got {n}")]
    TooManyVertices { n: usize, max: usize },
    #[error("edge {edge:?} has {got} vertices, expected {expected}")]
    WrongArity { edge: Vec<usize>, got: usize, expected: usize },
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("edge {0:?} repeats a vertex")]
    RepeatedVertex(Vec<usize>),
    #[error("duplicate edge {0:?}")]
    DuplicateEdge(Vec<usize>),
    #[error("map is not a bijection on [0, {n})")]
    NotABijection { n: usize },
    #[error("k = {k} must satisfy k > r = {r} and k ≡ 1 (mod r)")]
    Divisibility { k: usize, r: usize },
    #[error("n = {n} too small, need n >= {min}")]
    TooFewVertices { n: usize, min: usize },
    #[error("{0}")]
    InvalidParameter(String),
}

/// Errors from the `.hg` text format.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("missing header line `<n> <r>`")]
    MissingHeader,
    #[error("line {line}: malformed header: {text:?}")]
    MalformedHeader { line: usize, text: String },
    #[error("line {line}: invalid token {token:?}")]
    BadToken { line: usize, token: String },
    #[error("line {line}: expected {expected} vertices, found {got}")]
    WrongArity { line: usize, expected: usize, got: usize },
    #[error("line {line}: vertex {vertex} out of range for n = {n}")]
    OutOfRange { line: usize, vertex: usize, n: usize },
    #[error("line {line}: vertices must be strictly increasing")]
    NotIncreasing { line: usize },
    #[error("line {line}: duplicate edge")]
    DuplicateEdge { line: usize },
    #[error("missing `# parts: <m> <r>` line")]
    MissingParts,
    #[error("{0}")]
    Graph(#[from] GraphError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("{formula}: domain violation, requires {requirement}")]
    Domain { formula: &'static str, requirement: String },
    #[error("integer overflow evaluating {0}")]
    Overflow(&'static str),
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("instance refused: {0}")]
    Infeasible(String),
    #[error("checkpoint {path}: {reason}")]
    CheckpointCorrupt { path: PathBuf, reason: String },
    #[error("checkpoint io: {0}")]
    Io(#[from] std::io::Error),
    #[error("internal check failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoverError {
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("instance exceeds exhaustive limit: {0}")]
    TooLarge(String),
    #[error("edge {0:?} is not transversal")]
    NotTransversal(Vec<usize>),
    #[error("instance has no edges")]
    Edgeless,
    #[error("subset {index} is empty or leaves its part")]
    BadSubset { index: usize },
    #[error("classes must be disjoint, equal-sized and at least r in number")]
    BadClasses,
    #[error(transparent)]
    Graph(#[from] GraphError),
}
