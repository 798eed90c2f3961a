//! Degree, pagerank, betweenness and closeness centralities.
//!
//! All four measures operate on the undirected simple projection of the
//! graph (parallel edges collapsed, self-loops ignored by traversals).
//! Betweenness uses Brandes dependency accumulation; a brute-force
//! enumeration oracle is exported alongside it for verification on small
//! graphs.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::CentralityError;
use crate::graph::{Graph, NodeId, Projection};

/// All four per-node measures computed on one frozen snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityTable {
    pub degree: Vec<f64>,
    pub pagerank: Vec<f64>,
    pub betweenness: Vec<f64>,
    pub closeness: Vec<f64>,
    pub n: usize,
    /// True when pagerank had to redistribute mass from degree-zero nodes.
    pub pagerank_dangling: bool,
}

/// Pagerank values plus convergence metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct PagerankOutcome {
    pub values: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    /// Degree-zero nodes were present; their mass was spread uniformly.
    pub dangling_patched: bool,
}

/// deg(k) / (N-1) on the undirected projection.
pub fn degree_centrality(g: &Graph) -> Result<Vec<f64>, CentralityError> {
    let n = g.node_count();
    if n < 2 {
        return Err(CentralityError::TooFewNodes { need: 2, got: n });
    }
    let proj = g.projection();
    Ok((0..n)
        .map(|v| proj.degree(v) as f64 / (n - 1) as f64)
        .collect())
}

/// Undirected random-walk pagerank, normalized to sum 1.
///
/// With `damping < 1` this is standard power iteration with the uniform
/// teleport term. `damping == 1` drops the teleport term entirely; to keep
/// that mode convergent on bipartite structures the update is averaged with
/// the current iterate (a lazy walk), which leaves the fixed point — the
/// degree-proportional stationary distribution on connected graphs —
/// unchanged. Degree-zero nodes donate their mass uniformly and the outcome
/// is flagged.
pub fn pagerank_centrality(
    g: &Graph,
    damping: f64,
    tol: f64,
    max_iter: usize,
) -> Result<PagerankOutcome, CentralityError> {
    let n = g.node_count();
    if n < 1 {
        return Err(CentralityError::TooFewNodes { need: 1, got: n });
    }
    if !(damping > 0.0 && damping <= 1.0) {
        return Err(CentralityError::InvalidDamping(damping));
    }
    if !(tol > 0.0) {
        return Err(CentralityError::InvalidTolerance(tol));
    }
    let proj = g.projection();
    pagerank_on_projection(&proj, damping, tol, max_iter)
}

pub(crate) fn pagerank_on_projection(
    proj: &Projection,
    damping: f64,
    tol: f64,
    max_iter: usize,
) -> Result<PagerankOutcome, CentralityError> {
    let n = proj.node_count();
    let deg: Vec<usize> = (0..n).map(|v| proj.neighbors[v].len()).collect();
    let dangling: Vec<NodeId> = (0..n).filter(|&v| deg[v] == 0).collect();
    let lazy = damping == 1.0;

    let mut x = vec![1.0 / n as f64; n];
    let mut y = vec![0.0; n];
    for it in 1..=max_iter {
        let dangling_mass: f64 = dangling.iter().map(|&v| x[v]).sum();
        let base = (1.0 - damping) / n as f64 + damping * dangling_mass / n as f64;
        for k in 0..n {
            let mut acc = 0.0;
            for &i in &proj.neighbors[k] {
                acc += x[i] / deg[i] as f64;
            }
            y[k] = base + damping * acc;
        }
        if lazy {
            for k in 0..n {
                y[k] = 0.5 * (x[k] + y[k]);
            }
        }
        let total: f64 = y.iter().sum();
        for v in y.iter_mut() {
            *v /= total;
        }
        let residual: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut y);
        if residual < tol {
            return Ok(PagerankOutcome {
                values: x,
                iterations: it,
                residual,
                dangling_patched: !dangling.is_empty(),
            });
        }
    }
    let residual: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum();
    Err(CentralityError::NoConvergence {
        iterations: max_iter,
        residual,
    })
}

/// Brandes betweenness on the undirected projection, normalized so a star
/// center scores exactly 1. Unreachable pairs contribute 0.
pub fn betweenness_centrality(g: &Graph) -> Result<Vec<f64>, CentralityError> {
    let n = g.node_count();
    if n < 3 {
        return Err(CentralityError::TooFewNodes { need: 3, got: n });
    }
    Ok(brandes_on_projection(&g.projection()))
}

pub(crate) fn brandes_on_projection(proj: &Projection) -> Vec<f64> {
    let n = proj.node_count();
    let mut bet = vec![0.0; n];
    let mut dist: Vec<i64> = vec![-1; n];
    let mut sigma = vec![0.0f64; n];
    let mut delta = vec![0.0f64; n];
    let mut preds: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    let mut stack: Vec<NodeId> = Vec::with_capacity(n);
    let mut queue = std::collections::VecDeque::new();

    for s in 0..n {
        for v in 0..n {
            dist[v] = -1;
            sigma[v] = 0.0;
            delta[v] = 0.0;
            preds[v].clear();
        }
        stack.clear();
        dist[s] = 0;
        sigma[s] = 1.0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in &proj.neighbors[v] {
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        while let Some(w) = stack.pop() {
            let coeff = (1.0 + delta[w]) / sigma[w];
            for &v in &preds[w] {
                delta[v] += sigma[v] * coeff;
            }
            if w != s {
                bet[w] += delta[w];
            }
        }
    }
    // The accumulation visits each unordered pair from both endpoints, so
    // dividing by (N-1)(N-2) yields the [0,1] pair-fraction scale.
    let norm = 1.0 / ((n - 1) * (n - 2)) as f64;
    for b in bet.iter_mut() {
        *b *= norm;
    }
    bet
}

const BRUTE_FORCE_LIMIT: usize = 12;

/// Betweenness by exhaustive shortest-path enumeration. Same contract as
/// [`betweenness_centrality`]; guarded to small graphs.
pub fn brute_force_betweenness(g: &Graph) -> Result<Vec<f64>, CentralityError> {
    let n = g.node_count();
    if n < 3 {
        return Err(CentralityError::TooFewNodes { need: 3, got: n });
    }
    if n > BRUTE_FORCE_LIMIT {
        return Err(CentralityError::GraphTooLarge {
            limit: BRUTE_FORCE_LIMIT,
            got: n,
        });
    }
    let proj = g.projection();
    let mut pair_fraction = vec![0.0f64; n];
    for i in 0..n {
        let sp = proj.bfs(i);
        for j in (i + 1)..n {
            if sp.dist[j].is_none() || sp.sigma[j] == 0.0 {
                continue;
            }
            let mut through = vec![0.0f64; n];
            let mut path = vec![j];
            collect_paths(&sp.preds, i, j, &mut path, &mut through);
            for k in 0..n {
                if k != i && k != j && through[k] > 0.0 {
                    pair_fraction[k] += through[k] / sp.sigma[j];
                }
            }
        }
    }
    let norm = 2.0 / ((n * n - 3 * n + 2) as f64);
    Ok(pair_fraction.iter().map(|&p| p * norm).collect())
}

// Walks the BFS predecessor DAG from `current` back to `source`, counting
// for every interior node how many shortest paths pass through it.
fn collect_paths(
    preds: &[Vec<NodeId>],
    source: NodeId,
    current: NodeId,
    path: &mut Vec<NodeId>,
    through: &mut [f64],
) {
    if current == source {
        for &k in path.iter().skip(1).rev().skip(1) {
            through[k] += 1.0;
        }
        return;
    }
    for &p in &preds[current] {
        path.push(p);
        collect_paths(preds, source, p, path, through);
        path.pop();
    }
}

/// Closeness on the undirected projection. Nodes in a component of size
/// `c < N` are scaled by (c-1)/(N-1); isolated nodes score 0.
pub fn closeness_centrality(g: &Graph) -> Result<Vec<f64>, CentralityError> {
    let n = g.node_count();
    if n < 2 {
        return Err(CentralityError::TooFewNodes { need: 2, got: n });
    }
    Ok(closeness_on_projection(&g.projection()))
}

pub(crate) fn closeness_on_projection(proj: &Projection) -> Vec<f64> {
    let n = proj.node_count();
    (0..n)
        .map(|v| {
            let sp = proj.bfs(v);
            let mut reach = 0usize;
            let mut sum = 0u64;
            for d in sp.dist.iter().flatten() {
                reach += 1;
                sum += u64::from(*d);
            }
            if reach <= 1 {
                return 0.0;
            }
            let within = (reach - 1) as f64 / sum as f64;
            let scale = (reach - 1) as f64 / (n - 1) as f64;
            scale * within
        })
        .collect()
}

/// Computes all four measures on the same frozen snapshot.
pub fn centrality_table(
    g: &Graph,
    pagerank_damping: f64,
    pagerank_tol: f64,
) -> Result<CentralityTable, CentralityError> {
    let n = g.node_count();
    if n < 3 {
        return Err(CentralityError::TooFewNodes { need: 3, got: n });
    }
    let proj = g.projection();
    let degree = (0..n)
        .map(|v| proj.degree(v) as f64 / (n - 1) as f64)
        .collect();
    let pr = pagerank_on_projection(&proj, pagerank_damping, pagerank_tol, 100_000)?;
    let betweenness = brandes_on_projection(&proj);
    let closeness = closeness_on_projection(&proj);
    Ok(CentralityTable {
        degree,
        pagerank: pr.values,
        betweenness,
        closeness,
        n,
        pagerank_dangling: pr.dangling_patched,
    })
}

impl CentralityTable {
    pub fn to_csv_string(&self) -> String {
        let mut s = String::from("node_id,degree_c,pagerank_c,betweenness_c,closeness_c\n");
        for v in 0..self.n {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                v, self.degree[v], self.pagerank[v], self.betweenness[v], self.closeness[v]
            );
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        fs::write(path, self.to_csv_string())
    }
}
