//! Phase-to-phase topology change.
//!
//! After a synchronization run, edges whose endpoints still disagree are
//! candidates for removal when either endpoint has low degree; a small
//! budget of fresh preferential edges then grows the graph back. Isolated
//! nodes left behind can be repaired by attaching each one to the current
//! maximum-degree hub.

use rand::Rng;
use serde::Serialize;

use crate::dynamics::StateVector;
use crate::error::EvolutionError;
use crate::generator::preferential_pick;
use crate::graph::{Graph, NodeId};
use crate::snapshot::PhaseSnapshot;

#[derive(Debug, Clone, PartialEq)]
pub struct RewireRule {
    /// State-difference threshold: an edge qualifies for dropping only when
    /// the endpoint states differ by more than this in the infinity norm.
    pub theta: f64,
    /// Degree ceiling: an edge qualifies only if its lower-degree endpoint
    /// has total degree at most this.
    pub d_low: usize,
    pub p_drop: f64,
    /// Preferential re-attachment budget per phase.
    pub growth_edges_per_phase: usize,
}

impl Default for RewireRule {
    fn default() -> Self {
        Self {
            theta: 0.5,
            d_low: 2,
            p_drop: 0.3,
            growth_edges_per_phase: 0,
        }
    }
}

impl RewireRule {
    pub fn validate(&self) -> Result<(), EvolutionError> {
        if !(0.0..=1.0).contains(&self.p_drop) {
            return Err(EvolutionError::InvalidRule(format!(
                "p_drop must lie in [0, 1], got {}",
                self.p_drop
            )));
        }
        if !(self.theta >= 0.0) {
            return Err(EvolutionError::InvalidRule(format!(
                "theta must be non-negative, got {}",
                self.theta
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RewireOutcome {
    pub graph: Graph,
    pub removed: Vec<(NodeId, NodeId)>,
    pub added: Vec<(NodeId, NodeId)>,
}

/// Applies one rewiring pass: state-gated drops, then preferential growth.
///
/// Degrees for the drop gate are frozen at phase start. Growth edges pick
/// both endpoints proportionally to current total degree, never forming a
/// self-loop; if no node has positive degree the remaining budget is
/// skipped, and if only the chosen source has degree the target falls back
/// to a uniform pick. The node set never changes.
pub fn rewire_phase(
    snapshot: &PhaseSnapshot,
    states: &StateVector,
    rule: &RewireRule,
    rng: &mut impl Rng,
) -> Result<RewireOutcome, EvolutionError> {
    rule.validate()?;
    let n = snapshot.graph.node_count();
    if states.node_count() != n {
        return Err(EvolutionError::DimensionMismatch {
            states: states.node_count(),
            graph: n,
        });
    }
    let mut g = snapshot.graph.clone();
    let degrees = snapshot.graph.degrees();

    let mut removed = Vec::new();
    let mut drop_ids = Vec::new();
    for (id, u, v) in g.edges() {
        if degrees.total(u).min(degrees.total(v)) > rule.d_low {
            continue;
        }
        let xu = states.node(u);
        let xv = states.node(v);
        let gap = xu
            .iter()
            .zip(xv)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if gap > rule.theta && rng.gen::<f64>() < rule.p_drop {
            drop_ids.push(id);
            removed.push((u, v));
        }
    }
    for id in drop_ids {
        g.remove_edge(id).unwrap();
    }

    let mut added = Vec::new();
    let mut weights: Vec<f64> = (0..n).map(|v| g.total_degree(v) as f64).collect();
    for _ in 0..rule.growth_edges_per_phase {
        let Ok(u) = preferential_pick(&weights, rng) else {
            break; // every node isolated; nothing to attach to
        };
        let saved = weights[u];
        weights[u] = 0.0;
        let v = match preferential_pick(&weights, rng) {
            Ok(v) => v,
            Err(_) => {
                // Only `u` carries degree; fall back to a uniform target.
                let mut v = rng.gen_range(0..n - 1);
                if v >= u {
                    v += 1;
                }
                v
            }
        };
        weights[u] = saved;
        g.add_edge(u, v).unwrap();
        weights[u] += 1.0;
        weights[v] += 1.0;
        added.push((u, v));
    }

    Ok(RewireOutcome { graph: g, removed, added })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepairOutcome {
    pub graph: Graph,
    /// Formerly isolated nodes, each now carrying exactly one edge.
    pub repaired: Vec<NodeId>,
    pub hub: NodeId,
    /// Set when no node had positive degree; everything was attached to the
    /// smallest node id instead of a true hub.
    pub all_isolated_fallback: bool,
}

impl RepairOutcome {
    pub fn repair_count(&self) -> usize {
        self.repaired.len()
    }
}

/// Connects every isolated node to the maximum-degree hub.
///
/// The hub is chosen once, before any repair, and held fixed for the pass.
/// When the whole graph is isolated there is no hub; every other node is
/// attached to node 0 and the outcome is flagged.
pub fn repair_isolated(g: &Graph) -> Result<RepairOutcome, EvolutionError> {
    let n = g.node_count();
    if n < 2 {
        return Err(EvolutionError::TooFewNodes(n));
    }
    let isolated = g.isolated_nodes();
    let mut out = g.clone();
    if isolated.is_empty() {
        let hub = g.max_degree_hub().unwrap();
        return Ok(RepairOutcome {
            graph: out,
            repaired: Vec::new(),
            hub,
            all_isolated_fallback: false,
        });
    }
    let hub = g.max_degree_hub().unwrap();
    if g.total_degree(hub) == 0 {
        // No hub exists; connect everything to the smallest id.
        let mut repaired = Vec::new();
        for v in 1..n {
            out.add_edge(v, 0).unwrap();
            repaired.push(v);
        }
        return Ok(RepairOutcome {
            graph: out,
            repaired,
            hub: 0,
            all_isolated_fallback: true,
        });
    }
    for &v in &isolated {
        out.add_edge(v, hub).unwrap();
    }
    Ok(RepairOutcome {
        graph: out,
        repaired: isolated,
        hub,
        all_isolated_fallback: false,
    })
}

/// One phase's topology-change events, JSON-lines friendly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseEvents {
    pub phase: usize,
    pub removed_edges: Vec<(NodeId, NodeId)>,
    pub added_edges: Vec<(NodeId, NodeId)>,
    pub repaired_nodes: Vec<NodeId>,
}
