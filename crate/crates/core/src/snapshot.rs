//! Frozen (topology, states) pairs — the unit every analysis runs on.

use crate::dynamics::StateVector;
use crate::graph::Graph;

/// One frozen phase of a dynamic network. Treat as immutable once built:
/// analyses assume the graph and states no longer change.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSnapshot {
    pub graph: Graph,
    pub states: StateVector,
    pub phase: usize,
    /// Wall-time step at which the snapshot was frozen (growth steps for
    /// generator snapshots, phase index for experiment snapshots).
    pub step: u64,
}

impl PhaseSnapshot {
    pub fn new(graph: Graph, states: StateVector, phase: usize, step: u64) -> Self {
        Self {
            graph,
            states,
            phase,
            step,
        }
    }
}
