//! Error types, one enum per subsystem.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("unknown node {0}")]
    UnknownNode(usize),
    #[error("unknown edge {0}")]
    UnknownEdge(usize),
    #[error("operation requires a non-empty graph")]
    EmptyGraph,
    #[error("edge list parse error at line {line}: {msg}")]
    ParseEdgeList { line: usize, msg: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeneratorError {
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("preferential pick over all-zero weights")]
    ZeroTotalWeight,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CentralityError {
    #[error("graph has {got} nodes, need at least {need}")]
    TooFewNodes { need: usize, got: usize },
    #[error("graph too large for brute-force enumeration ({got} nodes, limit {limit})")]
    GraphTooLarge { limit: usize, got: usize },
    #[error("pagerank damping must lie in (0, 1], got {0}")]
    InvalidDamping(f64),
    #[error("pagerank tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("pagerank did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("coupling strength must be positive, got {0}")]
    InvalidStrength(f64),
    #[error("step size must be positive, got {0}")]
    InvalidStepSize(f64),
    #[error("coupling matrix is {matrix} nodes but state vector holds {states}")]
    DimensionMismatch { matrix: usize, states: usize },
    #[error("inner coupling matrix is {inner}x{inner} but states have dimension {dim}")]
    InnerDimensionMismatch { inner: usize, dim: usize },
    #[error("coupling row {row} sums to {sum:e}, violating the zero-row-sum constraint")]
    RowSumViolation { row: usize, sum: f64 },
    #[error("matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("non-finite state at node {node}, step {step}")]
    NonFiniteState { node: usize, step: u64 },
    #[error(transparent)]
    Centrality(#[from] CentralityError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolutionError {
    #[error("invalid rewire rule: {0}")]
    InvalidRule(String),
    #[error("states hold {states} nodes but graph has {graph}")]
    DimensionMismatch { states: usize, graph: usize },
    #[error("repair requires at least two nodes, got {0}")]
    TooFewNodes(usize),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("need at least {need} samples, got {got}")]
    InsufficientData { need: usize, got: usize },
    #[error("tail is degenerate: fewer than two distinct values above every viable cutoff")]
    DegenerateTail,
    #[error("input lengths differ: {x} vs {y}")]
    LengthMismatch { x: usize, y: usize },
    #[error("zero variance in {0}")]
    ZeroVariance(String),
    #[error("invalid correlation matrix: {0}")]
    InvalidMatrix(String),
    #[error(transparent)]
    Centrality(#[from] CentralityError),
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error("phase {phase}: {source}")]
    Phase {
        phase: usize,
        #[source]
        source: PhaseError,
    },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Failure inside one phase of the pipeline, attached to its phase index by
/// [`ExperimentError::Phase`].
#[derive(Debug, Error)]
pub enum PhaseError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Centrality(#[from] CentralityError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
