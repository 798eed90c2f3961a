//! Simulation and analysis toolkit for dynamic scale-free networks: grows
//! directed preferential-attachment graphs, synchronizes node states under
//! coupling-configuration or centrality-based coupling, rewires topology in
//! response to state disagreement, and quantifies how far each phase drifts
//! from scale-free form (degree-distribution shape and centrality
//! correlation structure).

pub mod analysis;
pub mod centrality;
pub mod dynamics;
pub mod error;
pub mod evolution;
pub mod experiment;
pub mod generator;
pub mod graph;
pub mod snapshot;

pub use analysis::{
    classify_phase, correlation_matrix, correlation_matrix_with_ci, degree_histogram, fit_normal,
    fit_power_law, fit_power_law_at, pearson_correlation, Classification, CorrelationMatrix,
    FluctuationReason, Measure, NormalFit, PhaseReport, PowerLawFit, Verdict, DEG_BET_THRESHOLD,
};
pub use centrality::{
    betweenness_centrality, brute_force_betweenness, centrality_table, closeness_centrality,
    degree_centrality, pagerank_centrality, CentralityTable, PagerankOutcome,
};
pub use dynamics::{
    build_centrality_coupling, build_coupling_from_graph, run_sync, step, CouplingMatrix,
    CouplingMode, CouplingSpec, InnerCoupling, LocalDynamics, StateVector, SumForm, SyncSample,
    SyncSummary,
};
pub use error::{
    AnalysisError, CentralityError, DynamicsError, EvolutionError, ExperimentError,
    GeneratorError, GraphError, PhaseError,
};
pub use evolution::{
    repair_isolated, rewire_phase, PhaseEvents, RepairOutcome, RewireOutcome, RewireRule,
};
pub use experiment::{
    emit_plot_data, run_experiment, run_phase, stream_seed, write_artifacts, ExperimentConfig,
    ExperimentResult, PhaseOutput,
};
pub use generator::{
    export_trace, grow, preferential_pick, GenParams, GrowthEvent, GrowthEventKind, GrowthTrace,
};
pub use graph::{DegreeView, EdgeId, Graph, NodeId, Projection, ShortestPathData, TraversalMode};
pub use snapshot::PhaseSnapshot;
