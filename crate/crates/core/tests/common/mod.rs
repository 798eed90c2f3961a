//! Shared test fixtures and independent oracles.
//!
//! Everything here deliberately avoids the library's own algorithms: the
//! matrix exponential is a scaled Taylor series over a dense matrix, path
//! counting is exhaustive DFS enumeration, and the power-law sampler inverts
//! the zeta CDF directly.

// Each test binary compiles its own copy; not all of them use every helper.
#![allow(dead_code)]

use rand::Rng;
use sfnet_core::{Graph, NodeId};

/// G(n, p): each unordered pair becomes a directed edge u->v with
/// probability p.
pub fn gnp(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let mut g = Graph::with_nodes(n);
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen::<f64>() < p {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

fn is_connected(g: &Graph) -> bool {
    let n = g.node_count();
    if n == 0 {
        return false;
    }
    g.bfs_shortest_paths(0, sfnet_core::TraversalMode::Undirected)
        .unwrap()
        .reachable_count()
        == n
}

/// Rejection-samples G(n, p) until connected.
pub fn connected_gnp(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    loop {
        let g = gnp(n, p, rng);
        if is_connected(&g) {
            return g;
        }
    }
}

/// Single-source exhaustive shortest-path counts by DFS path enumeration;
/// the independent check for BFS sigma values. Undirected mode walks the
/// simple projection, directed mode the deduplicated out-neighbor lists
/// (self-loops skipped in both, matching the traversal convention).
pub fn enumerate_shortest_paths(
    g: &Graph,
    source: NodeId,
    mode: sfnet_core::TraversalMode,
) -> (Vec<Option<u32>>, Vec<u64>) {
    let adjacency: Vec<Vec<NodeId>> = match mode {
        sfnet_core::TraversalMode::Undirected => g.projection().neighbors,
        sfnet_core::TraversalMode::Directed => (0..g.node_count())
            .map(|v| {
                let mut nbrs: Vec<NodeId> = g
                    .out_neighbors(v)
                    .iter()
                    .map(|&(w, _)| w)
                    .filter(|&w| w != v)
                    .collect();
                nbrs.sort_unstable();
                nbrs.dedup();
                nbrs
            })
            .collect(),
    };
    let n = adjacency.len();
    let mut best: Vec<Option<u32>> = vec![None; n];
    let mut count: Vec<u64> = vec![0; n];
    best[source] = Some(0);
    count[source] = 1;
    let mut visited = vec![false; n];
    visited[source] = true;
    let mut stack: Vec<NodeId> = vec![source];
    dfs_paths(&adjacency, &mut visited, &mut stack, &mut best, &mut count);
    (best, count)
}

/// Standard-normal draws via Box-Muller, independent of any library
/// distribution code.
pub fn normal_draws(mu: f64, sigma: f64, n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let u1: f64 = rng.gen::<f64>().max(1e-300);
        let u2: f64 = rng.gen();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
        out.push(mu + sigma * r * c);
        if out.len() < n {
            out.push(mu + sigma * r * s);
        }
    }
    out
}

fn dfs_paths(
    adj: &[Vec<NodeId>],
    visited: &mut Vec<bool>,
    stack: &mut Vec<NodeId>,
    best: &mut Vec<Option<u32>>,
    count: &mut Vec<u64>,
) {
    let here = *stack.last().unwrap();
    let depth = (stack.len() - 1) as u32;
    for &next in &adj[here] {
        if visited[next] {
            continue;
        }
        let d = depth + 1;
        match best[next] {
            Some(b) if d > b => {} // longer than a known shortest path
            Some(b) if d == b => count[next] += 1,
            _ => {
                best[next] = Some(d);
                count[next] = 1;
            }
        }
        // Simple paths can only shrink distances along unvisited nodes, so
        // recursion below the current best depth is still necessary for
        // other targets.
        visited[next] = true;
        stack.push(next);
        dfs_paths(adj, visited, stack, best, count);
        stack.pop();
        visited[next] = false;
    }
}

/// Dense matrix exponential action: returns exp(t*C) * x via scaling and
/// squaring with a Taylor series, for small n.
pub fn expm_apply(c: &[Vec<f64>], t: f64, x: &[f64]) -> Vec<f64> {
    let n = c.len();
    let mut norm: f64 = 0.0;
    for row in c {
        let s: f64 = row.iter().map(|v| v.abs()).sum();
        norm = norm.max(s);
    }
    let scaled_norm = norm * t.abs();
    let squarings = if scaled_norm > 0.5 {
        (scaled_norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = t / f64::powi(2.0, squarings as i32);

    // exp(scale*C) by Taylor to machine precision.
    let mut term = identity(n);
    let mut acc = identity(n);
    for k in 1..=40 {
        term = matmul(&term, c);
        let f = scale / k as f64;
        for row in term.iter_mut() {
            for v in row.iter_mut() {
                *v *= f;
            }
        }
        let mut biggest: f64 = 0.0;
        for (i, row) in term.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                acc[i][j] += v;
                biggest = biggest.max(v.abs());
            }
        }
        if biggest < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        acc = matmul(&acc, &acc);
    }
    (0..n)
        .map(|i| (0..n).map(|j| acc[i][j] * x[j]).sum())
        .collect()
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

/// Inverse-CDF sampler for the discrete power law P(k) proportional to
/// k^(-alpha), k >= 1, truncated at a cap far beyond any plausible draw.
pub struct ZetaSampler {
    cdf: Vec<f64>,
}

impl ZetaSampler {
    pub fn new(alpha: f64) -> Self {
        let cap = 2_000_000;
        let mut cdf = Vec::with_capacity(cap);
        let mut acc = 0.0;
        for k in 1..=cap {
            acc += (k as f64).powf(-alpha);
            cdf.push(acc);
        }
        let total = acc;
        for v in cdf.iter_mut() {
            *v /= total;
        }
        Self { cdf }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.gen();
        match self
            .cdf
            .binary_search_by(|probe| probe.partial_cmp(&u).unwrap())
        {
            Ok(i) => i + 1,
            Err(i) => i + 1,
        }
    }
}

/// Max absolute difference between two equal-length slices.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
