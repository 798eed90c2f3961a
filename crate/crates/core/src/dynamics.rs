//! Coupled node-state dynamics.
//!
//! Node i evolves by forward Euler on
//! `dx_i/dt = f(x_i) + sum_j c_ij * A * x_j`, where the coupling
//! configuration matrix `C = (c_ij)` has each diagonal entry fixed to the
//! negated sum of its off-diagonal row so that every row sums to zero and a
//! uniform state is always a fixed point of the coupling term. `C` is built
//! either as uniform diffusive coupling over the current edges or by placing
//! a row-constant centrality score on the off-diagonal entries.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::Rng;

use crate::centrality;
use crate::error::DynamicsError;
use crate::graph::Graph;
use crate::snapshot::PhaseSnapshot;

/// Per-node states of fixed dimension, flattened row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    values: Vec<f64>,
    dim: usize,
    time: f64,
}

impl StateVector {
    pub fn zeros(nodes: usize, dim: usize) -> Self {
        assert!(dim >= 1, "state dimension must be at least 1");
        Self {
            values: vec![0.0; nodes * dim],
            dim,
            time: 0.0,
        }
    }

    pub fn from_values(values: Vec<f64>, dim: usize) -> Self {
        assert!(dim >= 1 && values.len() % dim == 0);
        Self {
            values,
            dim,
            time: 0.0,
        }
    }

    /// I.i.d. uniform states on `[lo, hi)`.
    pub fn uniform(nodes: usize, dim: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> Self {
        let values = (0..nodes * dim).map(|_| rng.gen_range(lo..hi)).collect();
        Self {
            values,
            dim,
            time: 0.0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Maximum pairwise state difference, taken per dimension in the
    /// infinity norm: `max_d (max_i x_id - min_i x_id)`.
    pub fn spread(&self) -> f64 {
        let n = self.node_count();
        if n == 0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for d in 0..self.dim {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for i in 0..n {
                let v = self.values[i * self.dim + d];
                lo = lo.min(v);
                hi = hi.max(v);
            }
            worst = worst.max(hi - lo);
        }
        worst
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Registry of local node dynamics `f`.
#[derive(Debug, Clone, PartialEq)]
pub enum LocalDynamics {
    Zero,
    LinearDecay { rate: f64 },
    Logistic { r: f64 },
    /// Requires state dimension 3.
    Lorenz { sigma: f64, rho: f64, beta: f64 },
}

impl LocalDynamics {
    pub fn eval(&self, x: &[f64], out: &mut [f64]) {
        match *self {
            LocalDynamics::Zero => out.fill(0.0),
            LocalDynamics::LinearDecay { rate } => {
                for (o, &v) in out.iter_mut().zip(x) {
                    *o = -rate * v;
                }
            }
            LocalDynamics::Logistic { r } => {
                for (o, &v) in out.iter_mut().zip(x) {
                    *o = r * v * (1.0 - v);
                }
            }
            LocalDynamics::Lorenz { sigma, rho, beta } => {
                out[0] = sigma * (x[1] - x[0]);
                out[1] = x[0] * (rho - x[2]) - x[1];
                out[2] = x[0] * x[1] - beta * x[2];
            }
        }
    }

    /// Dimension the dynamics requires, if constrained.
    pub fn required_dim(&self) -> Option<usize> {
        match self {
            LocalDynamics::Lorenz { .. } => Some(3),
            _ => None,
        }
    }

    /// Parses `zero`, `linear_decay:0.1`, `logistic:2.5` or
    /// `lorenz:10,28,2.667`.
    pub fn parse(spec: &str) -> Result<Self, String> {
        let (name, args) = match spec.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a)),
            None => (spec.trim(), None),
        };
        let floats = |s: &str| -> Result<Vec<f64>, String> {
            s.split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|e| e.to_string()))
                .collect()
        };
        match (name, args) {
            ("zero", None) => Ok(LocalDynamics::Zero),
            ("linear_decay", Some(a)) => {
                let v = floats(a)?;
                if v.len() != 1 {
                    return Err("linear_decay takes one parameter".into());
                }
                Ok(LocalDynamics::LinearDecay { rate: v[0] })
            }
            ("linear_decay", None) => Ok(LocalDynamics::LinearDecay { rate: 0.0 }),
            ("logistic", Some(a)) => {
                let v = floats(a)?;
                if v.len() != 1 {
                    return Err("logistic takes one parameter".into());
                }
                Ok(LocalDynamics::Logistic { r: v[0] })
            }
            ("lorenz", Some(a)) => {
                let v = floats(a)?;
                if v.len() != 3 {
                    return Err("lorenz takes three parameters".into());
                }
                Ok(LocalDynamics::Lorenz {
                    sigma: v[0],
                    rho: v[1],
                    beta: v[2],
                })
            }
            _ => Err(format!("unknown dynamics {spec:?}")),
        }
    }
}

impl std::fmt::Display for LocalDynamics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LocalDynamics::Zero => write!(f, "zero"),
            LocalDynamics::LinearDecay { rate } => write!(f, "linear_decay:{rate}"),
            LocalDynamics::Logistic { r } => write!(f, "logistic:{r}"),
            LocalDynamics::Lorenz { sigma, rho, beta } => {
                write!(f, "lorenz:{sigma},{rho},{beta}")
            }
        }
    }
}

/// How the coupling matrix is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingMode {
    /// Explicit matrix; uniform diffusive coupling over edges when built
    /// from a graph.
    Explicit,
    Degree,
    Pagerank,
    Betweenness,
    Closeness,
}

impl CouplingMode {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s.trim() {
            "explicit" => Ok(Self::Explicit),
            "degree" => Ok(Self::Degree),
            "pagerank" => Ok(Self::Pagerank),
            "betweenness" => Ok(Self::Betweenness),
            "closeness" => Ok(Self::Closeness),
            other => Err(format!("unknown coupling mode {other:?}")),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Explicit => "explicit",
            Self::Degree => "degree",
            Self::Pagerank => "pagerank",
            Self::Betweenness => "betweenness",
            Self::Closeness => "closeness",
        }
    }
}

/// Whether the coupling sum ranges over the whole row (diagonal included,
/// the form equivalent to difference coupling) or only off-diagonal entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SumForm {
    #[default]
    Full,
    OffDiagonal,
}

#[derive(Debug, Clone, PartialEq)]
enum CouplingKind {
    /// Off-diagonal entries per row, sorted by column.
    Sparse(Vec<Vec<(usize, f64)>>),
    /// `c_ij = row_value[i]` for every `j != i`.
    AllPairs(Vec<f64>),
}

/// Coupling configuration matrix with the zero-row-sum diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    n: usize,
    kind: CouplingKind,
    diag: Vec<f64>,
}

impl CouplingMatrix {
    /// Builds from a full square matrix, replacing the diagonal with the
    /// negated off-diagonal row sums.
    pub fn with_derived_diagonal(matrix: Vec<Vec<f64>>) -> Result<Self, DynamicsError> {
        let n = matrix.len();
        let mut rows = Vec::with_capacity(n);
        let mut diag = Vec::with_capacity(n);
        for (i, row) in matrix.into_iter().enumerate() {
            if row.len() != n {
                return Err(DynamicsError::NotSquare {
                    row: i,
                    len: row.len(),
                    n,
                });
            }
            let mut entries = Vec::new();
            let mut sum = 0.0;
            for (j, &v) in row.iter().enumerate() {
                if j != i && v != 0.0 {
                    entries.push((j, v));
                    sum += v;
                }
            }
            rows.push(entries);
            diag.push(-sum);
        }
        Ok(Self {
            n,
            kind: CouplingKind::Sparse(rows),
            diag,
        })
    }

    /// Builds from a full square matrix whose diagonal must already satisfy
    /// the zero-row-sum constraint within 1e-12.
    pub fn validated(matrix: Vec<Vec<f64>>) -> Result<Self, DynamicsError> {
        let n = matrix.len();
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(DynamicsError::NotSquare {
                    row: i,
                    len: row.len(),
                    n,
                });
            }
            let sum: f64 = row.iter().sum();
            if sum.abs() > 1e-12 {
                return Err(DynamicsError::RowSumViolation { row: i, sum });
            }
        }
        let diag = (0..n).map(|i| matrix[i][i]).collect();
        let rows = matrix
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                row.into_iter()
                    .enumerate()
                    .filter(|&(j, v)| j != i && v != 0.0)
                    .collect()
            })
            .collect();
        Ok(Self {
            n,
            kind: CouplingKind::Sparse(rows),
            diag,
        })
    }

    fn sparse(n: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let diag = rows
            .iter()
            .map(|row| -row.iter().map(|&(_, v)| v).sum::<f64>())
            .collect();
        Self {
            n,
            kind: CouplingKind::Sparse(rows),
            diag,
        }
    }

    fn all_pairs(row_value: Vec<f64>) -> Self {
        let n = row_value.len();
        let diag = row_value.iter().map(|&v| -(v * (n - 1) as f64)).collect();
        Self {
            n,
            kind: CouplingKind::AllPairs(row_value),
            diag,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diag[i];
        }
        match &self.kind {
            CouplingKind::Sparse(rows) => rows[i]
                .iter()
                .find(|&&(col, _)| col == j)
                .map_or(0.0, |&(_, v)| v),
            CouplingKind::AllPairs(vals) => vals[i],
        }
    }

    /// Diagonal plus off-diagonal entries, summed in construction order.
    pub fn row_sum(&self, i: usize) -> f64 {
        let off: f64 = match &self.kind {
            CouplingKind::Sparse(rows) => rows[i].iter().map(|&(_, v)| v).sum(),
            CouplingKind::AllPairs(vals) => vals[i] * (self.n - 1) as f64,
        };
        off + self.diag[i]
    }

    /// Writes `y_i = sum_j c_ij x_j` for all nodes into `out`, where states
    /// are `dim`-vectors. `OffDiagonal` skips the diagonal term.
    pub fn apply(&self, values: &[f64], dim: usize, form: SumForm, out: &mut [f64]) {
        debug_assert_eq!(values.len(), self.n * dim);
        debug_assert_eq!(out.len(), self.n * dim);
        match &self.kind {
            CouplingKind::Sparse(rows) => {
                for i in 0..self.n {
                    let base = i * dim;
                    out[base..base + dim].fill(0.0);
                    for &(j, w) in &rows[i] {
                        let jb = j * dim;
                        for d in 0..dim {
                            out[base + d] += w * values[jb + d];
                        }
                    }
                }
            }
            CouplingKind::AllPairs(vals) => {
                let mut col_sum = vec![0.0f64; dim];
                for i in 0..self.n {
                    for d in 0..dim {
                        col_sum[d] += values[i * dim + d];
                    }
                }
                for i in 0..self.n {
                    let base = i * dim;
                    for d in 0..dim {
                        out[base + d] = vals[i] * (col_sum[d] - values[base + d]);
                    }
                }
            }
        }
        if form == SumForm::Full {
            for i in 0..self.n {
                let base = i * dim;
                for d in 0..dim {
                    out[base + d] += self.diag[i] * values[base + d];
                }
            }
        }
    }
}

/// Inner coupling matrix `A` mapping a neighbor state into the influence
/// term.
#[derive(Debug, Clone, PartialEq)]
pub enum InnerCoupling {
    /// Identity of whatever dimension the states carry.
    Identity,
    /// Dense `dim x dim` matrix, row-major.
    Matrix { dim: usize, data: Vec<f64> },
}

impl InnerCoupling {
    pub fn matrix(dim: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), dim * dim);
        Self::Matrix { dim, data }
    }

    fn check_dim(&self, state_dim: usize) -> Result<(), DynamicsError> {
        match self {
            Self::Identity => Ok(()),
            Self::Matrix { dim, .. } if *dim == state_dim => Ok(()),
            Self::Matrix { dim, .. } => Err(DynamicsError::InnerDimensionMismatch {
                inner: *dim,
                dim: state_dim,
            }),
        }
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Self::Identity => out.copy_from_slice(x),
            Self::Matrix { dim, data } => {
                for r in 0..*dim {
                    let mut acc = 0.0;
                    for (c, &v) in x.iter().enumerate() {
                        acc += data[r * dim + c] * v;
                    }
                    out[r] = acc;
                }
            }
        }
    }
}

/// Fully built coupling: the matrix, the inner coupling, and how it was made.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSpec {
    pub mode: CouplingMode,
    pub matrix: CouplingMatrix,
    pub inner: InnerCoupling,
    pub strength: f64,
    pub edge_masked: bool,
    pub sum_form: SumForm,
}

/// Uniform diffusive coupling: `c_ij = strength` across every undirected
/// edge, zero elsewhere, diagonal derived.
pub fn build_coupling_from_graph(g: &Graph, strength: f64) -> Result<CouplingSpec, DynamicsError> {
    if !(strength > 0.0) {
        return Err(DynamicsError::InvalidStrength(strength));
    }
    let proj = g.projection();
    let rows = proj
        .neighbors
        .iter()
        .map(|nbrs| nbrs.iter().map(|&j| (j, strength)).collect())
        .collect();
    Ok(CouplingSpec {
        mode: CouplingMode::Explicit,
        matrix: CouplingMatrix::sparse(g.node_count(), rows),
        inner: InnerCoupling::Identity,
        strength,
        edge_masked: true,
        sum_form: SumForm::Full,
    })
}

/// Centrality-substituted coupling: `c_ij = strength * cen(i)` for `j != i`,
/// restricted to undirected edges when `edge_masked`, all pairs otherwise.
/// The value depends only on the row node, as the substitution dictates.
pub fn build_centrality_coupling(
    g: &Graph,
    mode: CouplingMode,
    strength: f64,
    edge_masked: bool,
) -> Result<CouplingSpec, DynamicsError> {
    if !(strength > 0.0) {
        return Err(DynamicsError::InvalidStrength(strength));
    }
    let cen: Vec<f64> = match mode {
        CouplingMode::Explicit => return build_coupling_from_graph(g, strength),
        CouplingMode::Degree => centrality::degree_centrality(g)?,
        // Damping 1 keeps the substituted score teleport-free.
        CouplingMode::Pagerank => centrality::pagerank_centrality(g, 1.0, 1e-10, 100_000)?.values,
        CouplingMode::Betweenness => centrality::betweenness_centrality(g)?,
        CouplingMode::Closeness => centrality::closeness_centrality(g)?,
    };
    let matrix = if edge_masked {
        let proj = g.projection();
        let rows = proj
            .neighbors
            .iter()
            .enumerate()
            .map(|(i, nbrs)| nbrs.iter().map(|&j| (j, strength * cen[i])).collect())
            .collect();
        CouplingMatrix::sparse(g.node_count(), rows)
    } else {
        CouplingMatrix::all_pairs(cen.iter().map(|&c| strength * c).collect())
    };
    Ok(CouplingSpec {
        mode,
        matrix,
        inner: InnerCoupling::Identity,
        strength,
        edge_masked,
        sum_form: SumForm::Full,
    })
}

/// One forward-Euler step. Pure: returns the advanced states.
pub fn step(
    states: &StateVector,
    spec: &CouplingSpec,
    f: &LocalDynamics,
    h: f64,
) -> Result<StateVector, DynamicsError> {
    let mut next = states.clone();
    let mut coupled = vec![0.0; states.values.len()];
    euler_step_into(states, spec, f, h, &mut coupled, &mut next, 0)?;
    Ok(next)
}

fn euler_step_into(
    states: &StateVector,
    spec: &CouplingSpec,
    f: &LocalDynamics,
    h: f64,
    coupled: &mut [f64],
    next: &mut StateVector,
    step_index: u64,
) -> Result<(), DynamicsError> {
    if !(h > 0.0) {
        return Err(DynamicsError::InvalidStepSize(h));
    }
    let n = states.node_count();
    let dim = states.dim;
    if spec.matrix.n() != n {
        return Err(DynamicsError::DimensionMismatch {
            matrix: spec.matrix.n(),
            states: n,
        });
    }
    spec.inner.check_dim(dim)?;
    if let Some(need) = f.required_dim() {
        if need != dim {
            return Err(DynamicsError::InnerDimensionMismatch { inner: need, dim });
        }
    }

    spec.matrix.apply(&states.values, dim, spec.sum_form, coupled);

    let mut fx = vec![0.0; dim];
    let mut ay = vec![0.0; dim];
    for i in 0..n {
        let base = i * dim;
        f.eval(&states.values[base..base + dim], &mut fx);
        spec.inner.apply(&coupled[base..base + dim], &mut ay);
        for d in 0..dim {
            let v = states.values[base + d] + h * (fx[d] + ay[d]);
            if !v.is_finite() {
                return Err(DynamicsError::NonFiniteState {
                    node: i,
                    step: step_index,
                });
            }
            next.values[base + d] = v;
        }
    }
    next.time = states.time + h;
    next.dim = dim;
    Ok(())
}

/// One sampled point of a synchronization run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncSample {
    pub step: u64,
    pub time: f64,
    pub sync_error: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// Final states plus the sampled sync-error series.
#[derive(Debug, Clone, PartialEq)]
pub struct SyncSummary {
    pub final_states: StateVector,
    pub series: Vec<SyncSample>,
}

fn sample(states: &StateVector, step: u64) -> SyncSample {
    SyncSample {
        step,
        time: states.time,
        sync_error: states.spread(),
        mean: states.mean(),
        min: states.min(),
        max: states.max(),
    }
}

/// Integrates `steps` Euler steps from the snapshot's states, sampling the
/// spread every `sample_every` steps (and always at the endpoints).
pub fn run_sync(
    snapshot: &PhaseSnapshot,
    spec: &CouplingSpec,
    f: &LocalDynamics,
    h: f64,
    steps: u64,
    sample_every: u64,
) -> Result<SyncSummary, DynamicsError> {
    let every = sample_every.max(1);
    let mut cur = snapshot.states.clone();
    let mut next = cur.clone();
    let mut coupled = vec![0.0; cur.values.len()];
    let mut series = vec![sample(&cur, 0)];
    for s in 1..=steps {
        euler_step_into(&cur, spec, f, h, &mut coupled, &mut next, s)?;
        std::mem::swap(&mut cur, &mut next);
        if s % every == 0 || s == steps {
            series.push(sample(&cur, s));
        }
    }
    Ok(SyncSummary {
        final_states: cur,
        series,
    })
}

pub fn trajectory_csv_string(series: &[SyncSample]) -> String {
    let mut s = String::from("step,time,sync_error,state_mean,state_min,state_max\n");
    for p in series {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            p.step, p.time, p.sync_error, p.mean, p.min, p.max
        );
    }
    s
}

pub fn write_trajectory_csv(series: &[SyncSample], path: &Path) -> std::io::Result<()> {
    fs::write(path, trajectory_csv_string(series))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> Graph {
        let mut g = Graph::with_nodes(2);
        g.add_edge(0, 1).unwrap();
        g
    }

    fn p3() -> Graph {
        let mut g = Graph::with_nodes(3);
        g.add_edge(0, 1).unwrap();
        g.add_edge(1, 2).unwrap();
        g
    }

    #[test]
    fn diffusive_p2_matrix() {
        let spec = build_coupling_from_graph(&p2(), 1.0).unwrap();
        assert_eq!(spec.matrix.entry(0, 0), -1.0);
        assert_eq!(spec.matrix.entry(0, 1), 1.0);
        assert_eq!(spec.matrix.entry(1, 0), 1.0);
        assert_eq!(spec.matrix.entry(1, 1), -1.0);
    }

    #[test]
    fn derived_diagonal_is_negated_row_sum() {
        let m = CouplingMatrix::with_derived_diagonal(vec![
            vec![0.0, 0.3, 0.2],
            vec![0.1, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
        ])
        .unwrap();
        assert_eq!(m.entry(0, 0), -0.5);
        assert_eq!(m.entry(1, 1), -0.1);
        assert_eq!(m.entry(2, 2), 0.0);
        for i in 0..3 {
            assert!(m.row_sum(i).abs() < 1e-12);
        }
    }

    #[test]
    fn validated_rejects_bad_diagonal() {
        let err = CouplingMatrix::validated(vec![vec![0.0, 1.0], vec![1.0, -1.0]]);
        assert!(matches!(err, Err(DynamicsError::RowSumViolation { row: 0, .. })));
        let ok = CouplingMatrix::validated(vec![vec![-1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        assert_eq!(ok.entry(0, 0), -1.0);
    }

    #[test]
    fn centrality_coupling_row_values() {
        // Middle node of P3 has degree centrality 1.0; its masked row
        // couples to both neighbors at that value.
        let spec = build_centrality_coupling(&p3(), CouplingMode::Degree, 1.0, true).unwrap();
        assert_eq!(spec.matrix.entry(1, 0), 1.0);
        assert_eq!(spec.matrix.entry(1, 2), 1.0);
        assert_eq!(spec.matrix.entry(1, 1), -2.0);
        assert_eq!(spec.matrix.entry(0, 2), 0.0);

        // Star: leaves have betweenness 0, so their rows vanish; the center
        // couples to every leaf at its own score of 1.
        let mut star = Graph::with_nodes(5);
        for leaf in 1..5 {
            star.add_edge(0, leaf).unwrap();
        }
        let spec =
            build_centrality_coupling(&star, CouplingMode::Betweenness, 1.0, true).unwrap();
        for leaf in 1..5 {
            assert_eq!(spec.matrix.entry(leaf, 0), 0.0);
            assert_eq!(spec.matrix.entry(0, leaf), 1.0);
        }
        assert_eq!(spec.matrix.entry(0, 0), -4.0);
    }

    #[test]
    fn all_pairs_rows_sum_to_zero() {
        let spec = build_centrality_coupling(&p3(), CouplingMode::Closeness, 0.7, false).unwrap();
        for i in 0..3 {
            assert!(spec.matrix.row_sum(i).abs() < 1e-12, "row {i}");
            for j in 0..3 {
                if i != j {
                    assert!(spec.matrix.entry(i, j) > 0.0);
                }
            }
        }
    }

    #[test]
    fn euler_step_p2_by_hand() {
        let spec = build_coupling_from_graph(&p2(), 1.0).unwrap();
        let x = StateVector::from_values(vec![1.0, 0.0], 1);
        let next = step(&x, &spec, &LocalDynamics::Zero, 0.1).unwrap();
        assert!((next.values()[0] - 0.9).abs() < 1e-15);
        assert!((next.values()[1] - 0.1).abs() < 1e-15);
        assert!((next.time() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn symmetric_coupling_conserves_mean() {
        let spec = build_coupling_from_graph(&p3(), 1.0).unwrap();
        let x = StateVector::from_values(vec![0.3, -1.2, 0.7], 1);
        let before = x.mean();
        let next = step(&x, &spec, &LocalDynamics::Zero, 0.05).unwrap();
        assert!((next.mean() - before).abs() < 1e-12);
    }

    #[test]
    fn uniform_state_is_fixed_point_of_coupling() {
        for mode in [
            CouplingMode::Explicit,
            CouplingMode::Degree,
            CouplingMode::Pagerank,
            CouplingMode::Betweenness,
            CouplingMode::Closeness,
        ] {
            let spec = build_centrality_coupling(&p3(), mode, 1.0, true).unwrap();
            let x = StateVector::from_values(vec![0.42; 3], 1);
            let next = step(&x, &spec, &LocalDynamics::Zero, 0.1).unwrap();
            for &v in next.values() {
                assert!((v - 0.42).abs() < 1e-12, "mode {mode:?}");
            }
        }
    }

    #[test]
    fn diffusion_on_p3_reaches_consensus() {
        let spec = build_coupling_from_graph(&p3(), 1.0).unwrap();
        let snap = PhaseSnapshot::new(
            p3(),
            StateVector::from_values(vec![1.0, 0.0, -1.0], 1),
            0,
            0,
        );
        let out = run_sync(&snap, &spec, &LocalDynamics::Zero, 0.01, 10_000, 100).unwrap();
        let mean = out.final_states.mean();
        for i in 0..3 {
            assert!((out.final_states.node(i)[0] - mean).abs() < 1e-6);
        }
        // Spread never increases for diffusive coupling at a stable step.
        for w in out.series.windows(2) {
            assert!(w[1].sync_error <= w[0].sync_error + 1e-12);
        }
    }

    #[test]
    fn zero_steps_returns_initial_states() {
        let spec = build_coupling_from_graph(&p2(), 1.0).unwrap();
        let snap = PhaseSnapshot::new(p2(), StateVector::from_values(vec![1.0, -1.0], 1), 0, 0);
        let out = run_sync(&snap, &spec, &LocalDynamics::Zero, 0.01, 0, 10).unwrap();
        assert_eq!(out.final_states, snap.states);
        assert_eq!(out.series.len(), 1);
    }

    #[test]
    fn runs_are_deterministic() {
        let spec = build_centrality_coupling(&p3(), CouplingMode::Pagerank, 2.0, true).unwrap();
        let snap = PhaseSnapshot::new(
            p3(),
            StateVector::from_values(vec![0.9, -0.3, 0.1], 1),
            0,
            0,
        );
        let a = run_sync(&snap, &spec, &LocalDynamics::Zero, 0.01, 500, 50).unwrap();
        let b = run_sync(&snap, &spec, &LocalDynamics::Zero, 0.01, 500, 50).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn divergence_is_reported_with_step_and_node() {
        // Positive feedback with a huge step blows up quickly.
        let spec = build_coupling_from_graph(&p2(), 1.0).unwrap();
        let snap = PhaseSnapshot::new(p2(), StateVector::from_values(vec![1.0, -1.0], 1), 0, 0);
        let err = run_sync(
            &snap,
            &spec,
            &LocalDynamics::LinearDecay { rate: -1e150 },
            10.0,
            10,
            1,
        )
        .unwrap_err();
        match err {
            DynamicsError::NonFiniteState { step, .. } => assert!(step >= 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn step_linearity_for_linear_dynamics() {
        let spec = build_coupling_from_graph(&p3(), 0.8).unwrap();
        let f = LocalDynamics::LinearDecay { rate: 0.3 };
        let a = StateVector::from_values(vec![0.2, -0.5, 0.9], 1);
        let b = StateVector::from_values(vec![-1.0, 0.4, 0.3], 1);
        let sum = StateVector::from_values(
            a.values().iter().zip(b.values()).map(|(x, y)| x + y).collect(),
            1,
        );
        let sa = step(&a, &spec, &f, 0.02).unwrap();
        let sb = step(&b, &spec, &f, 0.02).unwrap();
        let ssum = step(&sum, &spec, &f, 0.02).unwrap();
        for i in 0..3 {
            assert!((ssum.values()[i] - (sa.values()[i] + sb.values()[i])).abs() < 1e-10);
        }
    }

    #[test]
    fn literal_off_diagonal_form_differs() {
        let spec_full = build_coupling_from_graph(&p2(), 1.0).unwrap();
        let mut spec_lit = spec_full.clone();
        spec_lit.sum_form = SumForm::OffDiagonal;
        let x = StateVector::from_values(vec![1.0, 0.0], 1);
        let full = step(&x, &spec_full, &LocalDynamics::Zero, 0.1).unwrap();
        let lit = step(&x, &spec_lit, &LocalDynamics::Zero, 0.1).unwrap();
        // Literal form omits the diagonal restoring term.
        assert!((full.values()[0] - 0.9).abs() < 1e-15);
        assert!((lit.values()[0] - 1.0).abs() < 1e-15);
        assert_eq!(lit.values()[1], 0.1);
    }

    #[test]
    fn lorenz_needs_dimension_three() {
        let spec = build_coupling_from_graph(&p2(), 1.0).unwrap();
        let x = StateVector::from_values(vec![1.0, 0.0], 1);
        let f = LocalDynamics::Lorenz {
            sigma: 10.0,
            rho: 28.0,
            beta: 8.0 / 3.0,
        };
        assert!(step(&x, &spec, &f, 0.01).is_err());
    }

    #[test]
    fn dynamics_parse_round_trip() {
        for s in ["zero", "linear_decay:0.5", "logistic:2.5", "lorenz:10,28,2.6"] {
            let d = LocalDynamics::parse(s).unwrap();
            assert_eq!(LocalDynamics::parse(&d.to_string()).unwrap(), d);
        }
        assert!(LocalDynamics::parse("waves").is_err());
        assert!(LocalDynamics::parse("lorenz:1,2").is_err());
    }
}
