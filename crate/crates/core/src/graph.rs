//! Directed multigraph with dense integer node ids.
//!
//! Node ids are dense `0..N-1` and stable within a snapshot, so every
//! per-node quantity in the crate is a plain `Vec` indexed by node. Parallel
//! edges and self-loops are permitted; self-loops are flagged so analyses can
//! apply the documented degree convention (a self-loop adds 2 to the degree
//! of its node and is ignored by shortest-path traversals).

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::GraphError;

pub type NodeId = usize;
pub type EdgeId = usize;

/// Whether a traversal follows edge direction or treats edges as symmetric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraversalMode {
    Directed,
    Undirected,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Graph {
    out_edges: Vec<Vec<(NodeId, EdgeId)>>,
    in_edges: Vec<Vec<(NodeId, EdgeId)>>,
    // Tombstoned on removal so edge ids stay stable.
    endpoints: Vec<Option<(NodeId, NodeId)>>,
    live_edges: usize,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_nodes(n: usize) -> Self {
        Self {
            out_edges: vec![Vec::new(); n],
            in_edges: vec![Vec::new(); n],
            endpoints: Vec::new(),
            live_edges: 0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.out_edges.len()
    }

    /// Number of live edges (parallel edges and self-loops each count once).
    pub fn edge_count(&self) -> usize {
        self.live_edges
    }

    /// Appends a node and returns its id, which is always the previous count.
    pub fn add_node(&mut self) -> NodeId {
        self.out_edges.push(Vec::new());
        self.in_edges.push(Vec::new());
        self.out_edges.len() - 1
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<EdgeId, GraphError> {
        let n = self.node_count();
        if u >= n {
            return Err(GraphError::UnknownNode(u));
        }
        if v >= n {
            return Err(GraphError::UnknownNode(v));
        }
        let id = self.endpoints.len();
        self.endpoints.push(Some((u, v)));
        self.out_edges[u].push((v, id));
        self.in_edges[v].push((u, id));
        self.live_edges += 1;
        Ok(id)
    }

    pub fn remove_edge(&mut self, e: EdgeId) -> Result<(), GraphError> {
        let (u, v) = self
            .endpoints
            .get(e)
            .copied()
            .flatten()
            .ok_or(GraphError::UnknownEdge(e))?;
        self.endpoints[e] = None;
        let pos = self.out_edges[u].iter().position(|&(_, id)| id == e).unwrap();
        self.out_edges[u].remove(pos);
        let pos = self.in_edges[v].iter().position(|&(_, id)| id == e).unwrap();
        self.in_edges[v].remove(pos);
        self.live_edges -= 1;
        Ok(())
    }

    pub fn edge_endpoints(&self, e: EdgeId) -> Option<(NodeId, NodeId)> {
        self.endpoints.get(e).copied().flatten()
    }

    /// Live edges in id order.
    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, NodeId, NodeId)> + '_ {
        self.endpoints
            .iter()
            .enumerate()
            .filter_map(|(id, ep)| ep.map(|(u, v)| (id, u, v)))
    }

    pub fn out_neighbors(&self, v: NodeId) -> &[(NodeId, EdgeId)] {
        &self.out_edges[v]
    }

    pub fn in_neighbors(&self, v: NodeId) -> &[(NodeId, EdgeId)] {
        &self.in_edges[v]
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_edges[v].len()
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_edges[v].len()
    }

    /// In-degree plus out-degree; a self-loop contributes 2.
    pub fn total_degree(&self, v: NodeId) -> usize {
        self.out_edges[v].len() + self.in_edges[v].len()
    }

    pub fn has_self_loop(&self, v: NodeId) -> bool {
        self.out_edges[v].iter().any(|&(w, _)| w == v)
    }

    pub fn degrees(&self) -> DegreeView {
        DegreeView {
            in_deg: (0..self.node_count()).map(|v| self.in_degree(v)).collect(),
            out_deg: (0..self.node_count()).map(|v| self.out_degree(v)).collect(),
        }
    }

    /// Nodes of total degree zero, ascending. Self-loops count as degree.
    pub fn isolated_nodes(&self) -> Vec<NodeId> {
        (0..self.node_count())
            .filter(|&v| self.total_degree(v) == 0)
            .collect()
    }

    /// Node of maximum total degree; ties broken by smallest id.
    pub fn max_degree_hub(&self) -> Result<NodeId, GraphError> {
        if self.node_count() == 0 {
            return Err(GraphError::EmptyGraph);
        }
        let mut best = 0;
        let mut best_deg = self.total_degree(0);
        for v in 1..self.node_count() {
            let d = self.total_degree(v);
            if d > best_deg {
                best = v;
                best_deg = d;
            }
        }
        Ok(best)
    }

    /// Hop-count distances and shortest-path counts from `source`.
    ///
    /// Path counts are over distinct node sequences, so parallel edges do not
    /// multiply them and self-loops are ignored.
    pub fn bfs_shortest_paths(
        &self,
        source: NodeId,
        mode: TraversalMode,
    ) -> Result<ShortestPathData, GraphError> {
        if source >= self.node_count() {
            return Err(GraphError::UnknownNode(source));
        }
        let adjacency = match mode {
            TraversalMode::Directed => self.distinct_out_adjacency(),
            TraversalMode::Undirected => self.projection().neighbors,
        };
        Ok(bfs_counting(&adjacency, source))
    }

    fn distinct_out_adjacency(&self) -> Vec<Vec<NodeId>> {
        self.out_edges
            .iter()
            .enumerate()
            .map(|(v, outs)| {
                let mut nbrs: Vec<NodeId> =
                    outs.iter().map(|&(w, _)| w).filter(|&w| w != v).collect();
                nbrs.sort_unstable();
                nbrs.dedup();
                nbrs
            })
            .collect()
    }

    /// Undirected simple projection: parallel edges collapse to one, edge
    /// direction is dropped, self-loops are kept only as per-node flags.
    pub fn projection(&self) -> Projection {
        let n = self.node_count();
        let mut neighbors = vec![Vec::new(); n];
        let mut self_loop = vec![false; n];
        for (_, u, v) in self.edges() {
            if u == v {
                self_loop[u] = true;
            } else {
                neighbors[u].push(v);
                neighbors[v].push(u);
            }
        }
        let mut edge_count = 0;
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        Projection {
            neighbors,
            self_loop,
            edge_count: edge_count / 2,
        }
    }

    /// Edge-list text: a `# nodes: N` header (so trailing isolated nodes
    /// survive a round trip) followed by one `u v` line per live edge.
    pub fn to_edge_list_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# nodes: {}", self.node_count());
        for (_, u, v) in self.edges() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    pub fn from_edge_list_str(text: &str) -> Result<Self, GraphError> {
        let mut declared_nodes: Option<usize> = None;
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut max_id = None::<usize>;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(rest) = comment.trim().strip_prefix("nodes:") {
                    declared_nodes =
                        Some(rest.trim().parse().map_err(|_| GraphError::ParseEdgeList {
                            line: idx + 1,
                            msg: format!("bad node count {rest:?}"),
                        })?);
                }
                continue;
            }
            let mut it = line.split_whitespace();
            let (u, v) = match (it.next(), it.next(), it.next()) {
                (Some(a), Some(b), None) => {
                    let parse = |tok: &str| {
                        tok.parse::<usize>().map_err(|_| GraphError::ParseEdgeList {
                            line: idx + 1,
                            msg: format!("bad node id {tok:?}"),
                        })
                    };
                    (parse(a)?, parse(b)?)
                }
                _ => {
                    return Err(GraphError::ParseEdgeList {
                        line: idx + 1,
                        msg: format!("expected `u v`, got {line:?}"),
                    })
                }
            };
            max_id = Some(max_id.map_or(u.max(v), |m: usize| m.max(u).max(v)));
            pairs.push((u, v));
        }
        let n = match (declared_nodes, max_id) {
            (Some(n), Some(m)) if m >= n => {
                return Err(GraphError::ParseEdgeList {
                    line: 0,
                    msg: format!("edge references node {m} but header declares {n} nodes"),
                })
            }
            (Some(n), _) => n,
            (None, Some(m)) => m + 1,
            (None, None) => 0,
        };
        let mut g = Graph::with_nodes(n);
        for (u, v) in pairs {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn write_edge_list(&self, path: &Path) -> std::io::Result<()> {
        fs::write(path, self.to_edge_list_string())
    }

    pub fn read_edge_list(path: &Path) -> Result<Self, GraphError> {
        let text = fs::read_to_string(path).map_err(|e| GraphError::ParseEdgeList {
            line: 0,
            msg: e.to_string(),
        })?;
        Self::from_edge_list_str(&text)
    }
}

/// Per-node in/out/total degrees frozen at construction time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeView {
    in_deg: Vec<usize>,
    out_deg: Vec<usize>,
}

impl DegreeView {
    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_deg[v]
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_deg[v]
    }

    pub fn total(&self, v: NodeId) -> usize {
        self.in_deg[v] + self.out_deg[v]
    }

    pub fn totals(&self) -> Vec<usize> {
        (0..self.in_deg.len()).map(|v| self.total(v)).collect()
    }

    pub fn len(&self) -> usize {
        self.in_deg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.in_deg.is_empty()
    }
}

/// Undirected simple projection of a directed multigraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projection {
    pub neighbors: Vec<Vec<NodeId>>,
    pub self_loop: Vec<bool>,
    /// Distinct undirected node pairs, self-loops excluded.
    pub edge_count: usize,
}

impl Projection {
    pub fn node_count(&self) -> usize {
        self.neighbors.len()
    }

    /// Projection degree: distinct neighbors, plus 2 if the node carries a
    /// self-loop.
    pub fn degree(&self, v: NodeId) -> usize {
        self.neighbors[v].len() + if self.self_loop[v] { 2 } else { 0 }
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.node_count()).map(|v| self.degree(v)).collect()
    }

    pub fn bfs(&self, source: NodeId) -> ShortestPathData {
        bfs_counting(&self.neighbors, source)
    }
}

/// Single-source shortest-path data: hop distances, path counts and BFS
/// predecessor sets. Unreachable nodes have distance `None` and count 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortestPathData {
    pub source: NodeId,
    pub dist: Vec<Option<u32>>,
    pub sigma: Vec<f64>,
    pub preds: Vec<Vec<NodeId>>,
}

impl ShortestPathData {
    pub fn reachable_count(&self) -> usize {
        self.dist.iter().filter(|d| d.is_some()).count()
    }
}

fn bfs_counting(adjacency: &[Vec<NodeId>], source: NodeId) -> ShortestPathData {
    let n = adjacency.len();
    let mut dist = vec![None; n];
    let mut sigma = vec![0.0; n];
    let mut preds = vec![Vec::new(); n];
    dist[source] = Some(0);
    sigma[source] = 1.0;
    let mut queue = VecDeque::new();
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        let dv = dist[v].unwrap();
        for &w in &adjacency[v] {
            if dist[w].is_none() {
                dist[w] = Some(dv + 1);
                queue.push_back(w);
            }
            if dist[w] == Some(dv + 1) {
                sigma[w] += sigma[v];
                preds[w].push(v);
            }
        }
    }
    ShortestPathData {
        source,
        dist,
        sigma,
        preds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        let mut g = Graph::with_nodes(3);
        g.add_edge(0, 1).unwrap();
        g.add_edge(1, 2).unwrap();
        g
    }

    fn star_k14() -> Graph {
        let mut g = Graph::with_nodes(5);
        for leaf in 1..5 {
            g.add_edge(0, leaf).unwrap();
        }
        g
    }

    #[test]
    fn add_node_returns_dense_ids() {
        let mut g = Graph::new();
        assert_eq!(g.add_node(), 0);
        let mut g5 = Graph::with_nodes(5);
        assert_eq!(g5.add_node(), 5);
        let a = g.add_node();
        let b = g.add_node();
        assert_eq!(b, a + 1);
    }

    #[test]
    fn add_edge_allows_parallels_and_loops() {
        let mut g = Graph::with_nodes(3);
        g.add_edge(0, 1).unwrap();
        g.add_edge(0, 1).unwrap();
        assert_eq!(g.out_degree(0), 2);
        g.add_edge(0, 0).unwrap();
        assert!(g.has_self_loop(0));
        assert_eq!(g.total_degree(0), 4);
        assert_eq!(g.add_edge(0, 9), Err(GraphError::UnknownNode(9)));
    }

    #[test]
    fn remove_edge_restores_isolation_and_rejects_double_removal() {
        let mut g = Graph::with_nodes(2);
        let e = g.add_edge(0, 1).unwrap();
        g.remove_edge(e).unwrap();
        assert_eq!(g.isolated_nodes(), vec![0, 1]);
        assert_eq!(g.remove_edge(e), Err(GraphError::UnknownEdge(e)));

        let e1 = g.add_edge(0, 1).unwrap();
        let _e2 = g.add_edge(0, 1).unwrap();
        g.remove_edge(e1).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.out_degree(0), 1);
    }

    #[test]
    fn degree_sums_balance() {
        let mut g = Graph::with_nodes(4);
        g.add_edge(0, 1).unwrap();
        g.add_edge(1, 2).unwrap();
        g.add_edge(2, 2).unwrap();
        g.add_edge(3, 0).unwrap();
        let d = g.degrees();
        let in_sum: usize = (0..4).map(|v| d.in_degree(v)).sum();
        let out_sum: usize = (0..4).map(|v| d.out_degree(v)).sum();
        assert_eq!(in_sum, g.edge_count());
        assert_eq!(out_sum, g.edge_count());
    }

    #[test]
    fn bfs_path_graph() {
        let g = path3();
        let sp = g.bfs_shortest_paths(0, TraversalMode::Undirected).unwrap();
        assert_eq!(sp.dist, vec![Some(0), Some(1), Some(2)]);
        assert_eq!(sp.sigma, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn bfs_cycle_has_two_antipodal_paths() {
        let mut g = Graph::with_nodes(4);
        for (u, v) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
            g.add_edge(u, v).unwrap();
        }
        let sp = g.bfs_shortest_paths(0, TraversalMode::Undirected).unwrap();
        assert_eq!(sp.dist[2], Some(2));
        assert_eq!(sp.sigma[2], 2.0);
    }

    #[test]
    fn bfs_star_from_leaf() {
        // From a leaf of K1,4 every other leaf is at distance 2 via a unique
        // path through the center.
        let g = star_k14();
        let sp = g.bfs_shortest_paths(1, TraversalMode::Undirected).unwrap();
        for leaf in 2..5 {
            assert_eq!(sp.dist[leaf], Some(2));
            assert_eq!(sp.sigma[leaf], 1.0);
        }
        assert_eq!(sp.dist[0], Some(1));
    }

    #[test]
    fn bfs_directed_respects_orientation() {
        let g = path3();
        let sp = g.bfs_shortest_paths(2, TraversalMode::Directed).unwrap();
        assert_eq!(sp.dist, vec![None, None, Some(0)]);
        assert_eq!(sp.sigma[0], 0.0);
    }

    #[test]
    fn isolated_nodes_cases() {
        let mut g = Graph::with_nodes(3);
        g.add_edge(0, 1).unwrap();
        assert_eq!(g.isolated_nodes(), vec![2]);
        let g2 = path3();
        assert!(g2.isolated_nodes().is_empty());
        let g3 = Graph::with_nodes(3);
        assert_eq!(g3.isolated_nodes(), vec![0, 1, 2]);
        // A self-loop is nonzero degree.
        let mut g4 = Graph::with_nodes(1);
        g4.add_edge(0, 0).unwrap();
        assert!(g4.isolated_nodes().is_empty());
    }

    #[test]
    fn hub_selection_and_ties() {
        let g = star_k14();
        assert_eq!(g.max_degree_hub().unwrap(), 0);

        // Nodes 3 and 5 both have degree 2; smallest id wins.
        let mut g = Graph::with_nodes(6);
        g.add_edge(3, 0).unwrap();
        g.add_edge(1, 3).unwrap();
        g.add_edge(5, 2).unwrap();
        g.add_edge(4, 5).unwrap();
        assert_eq!(g.max_degree_hub().unwrap(), 3);

        let lone = Graph::with_nodes(1);
        assert_eq!(lone.max_degree_hub().unwrap(), 0);
        assert_eq!(Graph::new().max_degree_hub(), Err(GraphError::EmptyGraph));
    }

    #[test]
    fn projection_collapses_parallels_and_flags_loops() {
        let mut g = Graph::with_nodes(3);
        g.add_edge(0, 1).unwrap();
        g.add_edge(1, 0).unwrap();
        g.add_edge(0, 1).unwrap();
        g.add_edge(2, 2).unwrap();
        let p = g.projection();
        assert_eq!(p.neighbors[0], vec![1]);
        assert_eq!(p.edge_count, 1);
        assert_eq!(p.degree(0), 1);
        assert_eq!(p.degree(2), 2); // self-loop counts +2
        assert!(p.self_loop[2]);
    }

    #[test]
    fn edge_list_round_trip_preserves_isolated_nodes() {
        let mut g = Graph::with_nodes(5);
        g.add_edge(0, 1).unwrap();
        g.add_edge(1, 1).unwrap();
        let text = g.to_edge_list_string();
        let back = Graph::from_edge_list_str(&text).unwrap();
        assert_eq!(back.node_count(), 5);
        assert_eq!(back.edge_count(), 2);
        assert!(back.has_self_loop(1));
        assert_eq!(back.to_edge_list_string(), text);
    }

    #[test]
    fn edge_list_rejects_garbage() {
        assert!(Graph::from_edge_list_str("0 1 2").is_err());
        assert!(Graph::from_edge_list_str("a b").is_err());
        assert!(Graph::from_edge_list_str("# nodes: 2\n0 5").is_err());
        let g = Graph::from_edge_list_str("# comment\n\n0 1\n").unwrap();
        assert_eq!(g.node_count(), 2);
    }
}
