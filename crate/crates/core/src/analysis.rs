//! Per-phase statistical verdicts.
//!
//! A phase is summarized by the shape of its degree distribution (discrete
//! power-law MLE with KS cutoff selection, against a normal fit of the same
//! sample) and by the Pearson correlation structure of its four centrality
//! vectors. A phase counts as fluctuated from scale-free form when the
//! degree-betweenness correlation drops below 0.80 or when the normal fit
//! beats the power-law fit in KS distance.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::centrality::CentralityTable;
use crate::error::AnalysisError;
use crate::graph::Graph;

/// Correlation level expected between degree and betweenness centrality on
/// an intact scale-free topology.
pub const DEG_BET_THRESHOLD: f64 = 0.80;

/// Discrete power-law fit of a degree sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub alpha_hat: f64,
    pub k_min: usize,
    pub ks_stat: f64,
    pub n_tail: usize,
}

/// Normal fit of the same sample (moment estimates).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalFit {
    pub mu: f64,
    pub sigma: f64,
    pub ks_stat: f64,
    /// All values equal; the fit degenerates to a point mass.
    pub degenerate: bool,
}

/// Centrality measures in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Degree,
    Pagerank,
    Betweenness,
    Closeness,
}

pub const MEASURES: [Measure; 4] = [
    Measure::Degree,
    Measure::Pagerank,
    Measure::Betweenness,
    Measure::Closeness,
];

impl Measure {
    pub fn index(self) -> usize {
        match self {
            Measure::Degree => 0,
            Measure::Pagerank => 1,
            Measure::Betweenness => 2,
            Measure::Closeness => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Measure::Degree => "degree",
            Measure::Pagerank => "pagerank",
            Measure::Betweenness => "betweenness",
            Measure::Closeness => "closeness",
        }
    }
}

/// Symmetric 4x4 Pearson matrix over (degree, pagerank, betweenness,
/// closeness), optionally with bootstrap confidence intervals per entry.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    entries: [[f64; 4]; 4],
    pub ci: Option<[[(f64, f64); 4]; 4]>,
}

impl CorrelationMatrix {
    pub fn from_entries(entries: [[f64; 4]; 4]) -> Result<Self, AnalysisError> {
        for i in 0..4 {
            if (entries[i][i] - 1.0).abs() > 1e-9 {
                return Err(AnalysisError::InvalidMatrix(format!(
                    "diagonal entry ({i},{i}) = {}, expected 1",
                    entries[i][i]
                )));
            }
            for j in 0..4 {
                if (entries[i][j] - entries[j][i]).abs() > 1e-9 {
                    return Err(AnalysisError::InvalidMatrix(format!(
                        "asymmetric at ({i},{j})"
                    )));
                }
                if !(-1.0..=1.0).contains(&entries[i][j]) {
                    return Err(AnalysisError::InvalidMatrix(format!(
                        "entry ({i},{j}) = {} outside [-1, 1]",
                        entries[i][j]
                    )));
                }
            }
        }
        Ok(Self { entries, ci: None })
    }

    pub fn get(&self, a: Measure, b: Measure) -> f64 {
        self.entries[a.index()][b.index()]
    }

    /// Largest off-diagonal entry (by value) with its measure pair, scanning
    /// pairs in canonical order so ties resolve deterministically.
    pub fn max_off_diagonal(&self) -> (Measure, Measure, f64) {
        let mut best = (MEASURES[0], MEASURES[1], f64::NEG_INFINITY);
        for i in 0..4 {
            for j in (i + 1)..4 {
                let v = self.entries[i][j];
                if v > best.2 {
                    best = (MEASURES[i], MEASURES[j], v);
                }
            }
        }
        best
    }
}

/// Exact total-degree counts on the undirected projection.
pub fn degree_histogram(g: &Graph) -> BTreeMap<usize, usize> {
    let proj = g.projection();
    let mut hist = BTreeMap::new();
    for d in proj.degrees() {
        *hist.entry(d).or_insert(0) += 1;
    }
    hist
}

// Lower bound of the continuous tail model for a discrete cutoff: half a
// bin below the cutoff, clamped at 1 since degrees below 1 are excluded
// from the tail sample.
fn tail_bound(k_min: usize) -> f64 {
    (k_min as f64 - 0.5).max(1.0)
}

fn fit_tail(tail: &[usize], k_min: usize) -> Option<(f64, f64)> {
    let n = tail.len();
    let first = *tail.first()?;
    if tail.iter().all(|&k| k == first) {
        return None;
    }
    let b = tail_bound(k_min);
    let sum_ln: f64 = tail.iter().map(|&k| (k as f64 / b).ln()).sum();
    if sum_ln <= 0.0 {
        return None;
    }
    let alpha = 1.0 + n as f64 / sum_ln;

    // KS between the empirical tail CCDF and the fitted model, evaluated at
    // each distinct value; integers represent the bin [k-0.5, k+0.5).
    let mut ks: f64 = 0.0;
    let mut remaining = n;
    let mut idx = 0;
    while idx < tail.len() {
        let k = tail[idx];
        let emp = remaining as f64 / n as f64;
        let model = ((k as f64 - 0.5).max(b) / b).powf(-(alpha - 1.0));
        ks = ks.max((emp - model).abs());
        let mut j = idx;
        while j < tail.len() && tail[j] == k {
            j += 1;
        }
        remaining -= j - idx;
        idx = j;
    }
    Some((alpha, ks))
}

/// Power-law fit with the cutoff chosen to minimize KS distance over every
/// viable candidate (distinct sample values keeping at least 10 tail points
/// and two distinct tail values). Values below 1 are excluded.
pub fn fit_power_law(degrees: &[usize]) -> Result<PowerLawFit, AnalysisError> {
    let mut vals: Vec<usize> = degrees.iter().copied().filter(|&d| d >= 1).collect();
    if vals.len() < 10 {
        return Err(AnalysisError::InsufficientData {
            need: 10,
            got: vals.len(),
        });
    }
    vals.sort_unstable();
    let mut distinct = vals.clone();
    distinct.dedup();

    let mut best: Option<PowerLawFit> = None;
    for &k_min in &distinct {
        let start = vals.partition_point(|&k| k < k_min);
        let tail = &vals[start..];
        if tail.len() < 10 {
            break;
        }
        if let Some((alpha, ks)) = fit_tail(tail, k_min) {
            if best.map_or(true, |b| ks < b.ks_stat) {
                best = Some(PowerLawFit {
                    alpha_hat: alpha,
                    k_min,
                    ks_stat: ks,
                    n_tail: tail.len(),
                });
            }
        }
    }
    best.ok_or(AnalysisError::DegenerateTail)
}

/// Power-law fit at a forced cutoff, no selection.
pub fn fit_power_law_at(degrees: &[usize], k_min: usize) -> Result<PowerLawFit, AnalysisError> {
    let mut vals: Vec<usize> = degrees
        .iter()
        .copied()
        .filter(|&d| d >= 1.max(k_min))
        .collect();
    if vals.is_empty() {
        return Err(AnalysisError::InsufficientData { need: 2, got: 0 });
    }
    vals.sort_unstable();
    let (alpha, ks) = fit_tail(&vals, k_min).ok_or(AnalysisError::DegenerateTail)?;
    Ok(PowerLawFit {
        alpha_hat: alpha,
        k_min,
        ks_stat: ks,
        n_tail: vals.len(),
    })
}

// Abramowitz & Stegun 7.1.26, |error| < 1.5e-7.
fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592
            + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    sign * (1.0 - poly * (-x * x).exp())
}

fn normal_cdf(x: f64, mu: f64, sigma: f64) -> f64 {
    0.5 * (1.0 + erf((x - mu) / (sigma * std::f64::consts::SQRT_2)))
}

/// Moment-fit normal with KS distance against the fitted curve. Integer
/// values stand for the bin [k-0.5, k+0.5), so the model CDF is evaluated
/// at bin boundaries; without that correction the distance saturates at
/// half the largest bin mass no matter how good the fit is.
pub fn fit_normal(degrees: &[usize]) -> Result<NormalFit, AnalysisError> {
    let n = degrees.len();
    if n < 10 {
        return Err(AnalysisError::InsufficientData { need: 10, got: n });
    }
    let mu = degrees.iter().map(|&d| d as f64).sum::<f64>() / n as f64;
    let ss: f64 = degrees.iter().map(|&d| (d as f64 - mu).powi(2)).sum();
    let sigma = (ss / (n - 1) as f64).sqrt();
    if sigma == 0.0 {
        return Ok(NormalFit {
            mu,
            sigma,
            ks_stat: 0.0,
            degenerate: true,
        });
    }
    let mut sorted: Vec<usize> = degrees.to_vec();
    sorted.sort_unstable();
    let mut ks: f64 = 0.0;
    let mut below = 0usize;
    let mut idx = 0;
    while idx < sorted.len() {
        let k = sorted[idx];
        let mut j = idx;
        while j < sorted.len() && sorted[j] == k {
            j += 1;
        }
        let at_or_below = j;
        let lower = normal_cdf(k as f64 - 0.5, mu, sigma);
        let upper = normal_cdf(k as f64 + 0.5, mu, sigma);
        ks = ks.max((lower - below as f64 / n as f64).abs());
        ks = ks.max((upper - at_or_below as f64 / n as f64).abs());
        below = at_or_below;
        idx = j;
    }
    Ok(NormalFit {
        mu,
        sigma,
        ks_stat: ks,
        degenerate: false,
    })
}

/// Standard Pearson coefficient, clamped into [-1, 1].
pub fn pearson_correlation(x: &[f64], y: &[f64]) -> Result<f64, AnalysisError> {
    if x.len() != y.len() {
        return Err(AnalysisError::LengthMismatch { x: x.len(), y: y.len() });
    }
    if x.len() < 3 {
        return Err(AnalysisError::InsufficientData { need: 3, got: x.len() });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        cov += (a - mx) * (b - my);
        vx += (a - mx) * (a - mx);
        vy += (b - my) * (b - my);
    }
    if vx == 0.0 {
        return Err(AnalysisError::ZeroVariance("first argument".into()));
    }
    if vy == 0.0 {
        return Err(AnalysisError::ZeroVariance("second argument".into()));
    }
    Ok((cov / (vx * vy).sqrt()).clamp(-1.0, 1.0))
}

fn pearson_matrix(vectors: &[&[f64]; 4]) -> Result<[[f64; 4]; 4], AnalysisError> {
    let mut entries = [[1.0; 4]; 4];
    for i in 0..4 {
        for j in (i + 1)..4 {
            let r = pearson_correlation(vectors[i], vectors[j])?;
            entries[i][j] = r;
            entries[j][i] = r;
        }
    }
    Ok(entries)
}

/// All six off-diagonal Pearson coefficients of a centrality table.
pub fn correlation_matrix(table: &CentralityTable) -> Result<CorrelationMatrix, AnalysisError> {
    let vectors: [&[f64]; 4] = [
        &table.degree,
        &table.pagerank,
        &table.betweenness,
        &table.closeness,
    ];
    Ok(CorrelationMatrix {
        entries: pearson_matrix(&vectors)?,
        ci: None,
    })
}

/// Correlation matrix plus percentile-method 95% confidence intervals from
/// node resampling. Resamples that collapse a vector's variance are skipped;
/// the attempt budget is ten times the requested sample count.
pub fn correlation_matrix_with_ci(
    table: &CentralityTable,
    bootstrap_samples: usize,
    rng: &mut impl Rng,
) -> Result<CorrelationMatrix, AnalysisError> {
    let mut matrix = correlation_matrix(table)?;
    if bootstrap_samples == 0 {
        return Ok(matrix);
    }
    let n = table.n;
    let vectors: [&[f64]; 4] = [
        &table.degree,
        &table.pagerank,
        &table.betweenness,
        &table.closeness,
    ];
    let mut draws: [[Vec<f64>; 4]; 4] = Default::default();
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < bootstrap_samples && attempts < bootstrap_samples * 10 {
        attempts += 1;
        let idx: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        let sampled: Vec<Vec<f64>> = vectors
            .iter()
            .map(|v| idx.iter().map(|&i| v[i]).collect())
            .collect();
        let views: [&[f64]; 4] = [&sampled[0], &sampled[1], &sampled[2], &sampled[3]];
        let resampled = match pearson_matrix(&views) {
            Ok(m) => m,
            Err(AnalysisError::ZeroVariance(_)) => continue,
            Err(e) => return Err(e),
        };
        for i in 0..4 {
            for j in (i + 1)..4 {
                draws[i][j].push(resampled[i][j]);
            }
        }
        accepted += 1;
    }
    if accepted == 0 {
        return Ok(matrix);
    }
    let mut ci = [[(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        ci[i][i] = (1.0, 1.0);
        for j in (i + 1)..4 {
            let vals = &mut draws[i][j];
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let rank = |q: f64| ((vals.len() - 1) as f64 * q).round() as usize;
            let pair = (vals[rank(0.025)], vals[rank(0.975)]);
            ci[i][j] = pair;
            ci[j][i] = pair;
        }
    }
    matrix.ci = Some(ci);
    Ok(matrix)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    ScaleFreeSustained,
    Fluctuated,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::ScaleFreeSustained => "scale_free_sustained",
            Verdict::Fluctuated => "fluctuated",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FluctuationReason {
    /// Degree-betweenness correlation fell below the scale-free level.
    DegBetBelowThreshold { value: f64 },
    /// The normal fit beat the power-law fit in KS distance.
    NormalBeatsPowerLaw { ks_norm: f64, ks_pl: f64 },
}

impl FluctuationReason {
    pub fn code(&self) -> &'static str {
        match self {
            FluctuationReason::DegBetBelowThreshold { .. } => {
                "low_degree_betweenness_correlation"
            }
            FluctuationReason::NormalBeatsPowerLaw { .. } => "normal_fit_beats_power_law",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub verdict: Verdict,
    pub reasons: Vec<FluctuationReason>,
    pub max_pair: (Measure, Measure, f64),
}

/// Applies the two fluctuation criteria to one phase's fits and matrix.
pub fn classify_phase(
    power_law: &PowerLawFit,
    normal: &NormalFit,
    corr: &CorrelationMatrix,
) -> Classification {
    let mut reasons = Vec::new();
    let db = corr.get(Measure::Degree, Measure::Betweenness);
    if db < DEG_BET_THRESHOLD {
        reasons.push(FluctuationReason::DegBetBelowThreshold { value: db });
    }
    if normal.ks_stat < power_law.ks_stat {
        reasons.push(FluctuationReason::NormalBeatsPowerLaw {
            ks_norm: normal.ks_stat,
            ks_pl: power_law.ks_stat,
        });
    }
    let verdict = if reasons.is_empty() {
        Verdict::ScaleFreeSustained
    } else {
        Verdict::Fluctuated
    };
    Classification {
        verdict,
        reasons,
        max_pair: corr.max_off_diagonal(),
    }
}

/// Full per-phase analysis output.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseReport {
    pub phase: usize,
    pub nodes: usize,
    pub edges: usize,
    pub isolated_before_repair: usize,
    pub power_law: PowerLawFit,
    pub normal: NormalFit,
    pub corr: CorrelationMatrix,
    pub verdict: Verdict,
    pub reasons: Vec<FluctuationReason>,
    pub max_pair: (Measure, Measure, f64),
}

#[derive(Serialize)]
struct CorrRecord {
    db: f64,
    dp: f64,
    dc: f64,
    pb: f64,
    pc: f64,
    bc: f64,
}

#[derive(Serialize)]
struct CiRecord {
    db: (f64, f64),
    dp: (f64, f64),
    dc: (f64, f64),
    pb: (f64, f64),
    pc: (f64, f64),
    bc: (f64, f64),
}

#[derive(Serialize)]
struct ReportRecord<'a> {
    phase: usize,
    n: usize,
    m: usize,
    isolated_before_repair: usize,
    alpha_hat: f64,
    kmin: usize,
    ks_pl: f64,
    mu: f64,
    sigma: f64,
    ks_norm: f64,
    corr: CorrRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    ci: Option<CiRecord>,
    verdict: &'a str,
    reasons: Vec<&'a str>,
    max_pair: (&'a str, &'a str, f64),
}

impl PhaseReport {
    /// One JSON line matching the documented report schema.
    pub fn to_json_line(&self) -> String {
        use Measure::*;
        let c = &self.corr;
        let record = ReportRecord {
            phase: self.phase,
            n: self.nodes,
            m: self.edges,
            isolated_before_repair: self.isolated_before_repair,
            alpha_hat: self.power_law.alpha_hat,
            kmin: self.power_law.k_min,
            ks_pl: self.power_law.ks_stat,
            mu: self.normal.mu,
            sigma: self.normal.sigma,
            ks_norm: self.normal.ks_stat,
            corr: CorrRecord {
                db: c.get(Degree, Betweenness),
                dp: c.get(Degree, Pagerank),
                dc: c.get(Degree, Closeness),
                pb: c.get(Pagerank, Betweenness),
                pc: c.get(Pagerank, Closeness),
                bc: c.get(Betweenness, Closeness),
            },
            ci: self.corr.ci.map(|ci| CiRecord {
                db: ci[0][2],
                dp: ci[0][1],
                dc: ci[0][3],
                pb: ci[1][2],
                pc: ci[1][3],
                bc: ci[2][3],
            }),
            verdict: self.verdict.name(),
            reasons: self.reasons.iter().map(|r| r.code()).collect(),
            max_pair: (self.max_pair.0.name(), self.max_pair.1.name(), self.max_pair.2),
        };
        serde_json::to_string(&record).expect("report serialization cannot fail")
    }
}
