//! Full pipeline orchestration: grow a network, then per phase build the
//! coupling, synchronize, rewire, repair and analyze, emitting every report.
//!
//! Determinism contract: the master seed is split into independent streams
//! (generator, per-phase initial states, per-phase rewiring, per-phase
//! bootstrap), so identical configs reproduce identical results byte for
//! byte, and any single phase can be rerun in isolation from its input
//! snapshot.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use rand::SeedableRng;
use rand_pcg::Pcg64;
use serde::Serialize;

use crate::analysis::{
    classify_phase, correlation_matrix_with_ci, degree_histogram, fit_normal, fit_power_law,
    PhaseReport,
};
use crate::centrality::centrality_table;
use crate::dynamics::{
    build_centrality_coupling, run_sync, trajectory_csv_string, CouplingMode, LocalDynamics,
    StateVector, SyncSample,
};
use crate::error::{ExperimentError, PhaseError};
use crate::evolution::{repair_isolated, rewire_phase, PhaseEvents, RewireRule};
use crate::generator::{grow, GenParams};
use crate::graph::Graph;
use crate::snapshot::PhaseSnapshot;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    // Generator.
    pub n_target: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta_in: f64,
    pub delta_out: f64,
    pub snapshot_every: usize,
    // Coupling and integration.
    pub coupling_mode: CouplingMode,
    pub coupling_strength: f64,
    pub edge_masked: bool,
    pub dynamics: LocalDynamics,
    pub state_dim: usize,
    pub h: f64,
    pub steps_per_phase: u64,
    pub sample_every: u64,
    // Rewiring.
    pub theta: f64,
    pub d_low: usize,
    pub p_drop: f64,
    /// Fixed growth budget per phase; `None` derives ceil(0.02 * |E|) from
    /// the current edge count.
    pub growth_edges_per_phase: Option<usize>,
    pub repair_enabled: bool,
    // Analysis.
    pub phases: usize,
    pub bootstrap_samples: usize,
    pub pagerank_damping: f64,
    pub pagerank_tol: f64,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_target: 1000,
            alpha: 0.41,
            beta: 0.54,
            gamma: 0.05,
            delta_in: 0.2,
            delta_out: 0.0,
            snapshot_every: 500,
            coupling_mode: CouplingMode::Closeness,
            coupling_strength: 0.05,
            edge_masked: true,
            dynamics: LocalDynamics::LinearDecay { rate: 0.0 },
            state_dim: 1,
            h: 0.01,
            steps_per_phase: 5000,
            sample_every: 50,
            theta: 0.5,
            d_low: 2,
            p_drop: 0.3,
            growth_edges_per_phase: None,
            repair_enabled: true,
            phases: 30,
            bootstrap_samples: 0,
            pagerank_damping: 0.85,
            pagerank_tol: 1e-10,
            seed: 42,
        }
    }
}

impl ExperimentConfig {
    pub fn gen_params(&self, master_seed: u64) -> GenParams {
        GenParams {
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            delta_in: self.delta_in,
            delta_out: self.delta_out,
            n_target: self.n_target,
            seed: stream_seed(master_seed, "generator", 0),
            snapshot_every: self.snapshot_every,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        self.gen_params(self.seed)
            .validate()
            .map_err(|e| ExperimentError::Config(e.to_string()))?;
        let rule = RewireRule {
            theta: self.theta,
            d_low: self.d_low,
            p_drop: self.p_drop,
            growth_edges_per_phase: 0,
        };
        rule.validate()
            .map_err(|e| ExperimentError::Config(e.to_string()))?;
        if self.phases < 1 {
            return Err(ExperimentError::Config("phases must be at least 1".into()));
        }
        if !(self.h > 0.0) {
            return Err(ExperimentError::Config(format!(
                "h must be positive, got {}",
                self.h
            )));
        }
        if !(self.coupling_strength > 0.0) {
            return Err(ExperimentError::Config(format!(
                "coupling_strength must be positive, got {}",
                self.coupling_strength
            )));
        }
        if self.state_dim < 1 {
            return Err(ExperimentError::Config("state_dim must be at least 1".into()));
        }
        if let Some(need) = self.dynamics.required_dim() {
            if need != self.state_dim {
                return Err(ExperimentError::Config(format!(
                    "dynamics {} needs state_dim {need}, got {}",
                    self.dynamics, self.state_dim
                )));
            }
        }
        if !(self.pagerank_damping > 0.0 && self.pagerank_damping <= 1.0) {
            return Err(ExperimentError::Config(format!(
                "pagerank_damping must lie in (0, 1], got {}",
                self.pagerank_damping
            )));
        }
        if !(self.pagerank_tol > 0.0) {
            return Err(ExperimentError::Config("pagerank_tol must be positive".into()));
        }
        Ok(())
    }

    /// Parses the flat `key = value` config format. Unknown or duplicate
    /// keys are errors; `#` starts a comment; order is irrelevant. Missing
    /// keys keep their defaults.
    pub fn parse_str(text: &str) -> Result<Self, ExperimentError> {
        let mut cfg = Self::default();
        let mut seen = std::collections::BTreeSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ExperimentError::Config(format!("line {}: expected `key = value`", idx + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            if !seen.insert(key.to_string()) {
                return Err(ExperimentError::Config(format!(
                    "line {}: duplicate key {key:?}",
                    idx + 1
                )));
            }
            cfg.apply_kv(key, value)
                .map_err(|e| ExperimentError::Config(format!("line {}: {e}", idx + 1)))?;
        }
        Ok(cfg)
    }

    fn apply_kv(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(v: &str) -> Result<T, String>
        where
            T::Err: std::fmt::Display,
        {
            v.parse().map_err(|e| format!("bad value {v:?}: {e}"))
        }
        fn boolean(v: &str) -> Result<bool, String> {
            match v {
                "true" => Ok(true),
                "false" => Ok(false),
                _ => Err(format!("bad boolean {v:?}")),
            }
        }
        match key {
            "n_target" => self.n_target = num(value)?,
            "alpha" => self.alpha = num(value)?,
            "beta" => self.beta = num(value)?,
            "gamma" => self.gamma = num(value)?,
            "delta_in" => self.delta_in = num(value)?,
            "delta_out" => self.delta_out = num(value)?,
            "snapshot_every" => self.snapshot_every = num(value)?,
            "coupling_mode" => self.coupling_mode = CouplingMode::parse(value)?,
            "coupling_strength" => self.coupling_strength = num(value)?,
            "edge_masked" => self.edge_masked = boolean(value)?,
            "dynamics" => self.dynamics = LocalDynamics::parse(value)?,
            "state_dim" => self.state_dim = num(value)?,
            "h" => self.h = num(value)?,
            "steps_per_phase" => self.steps_per_phase = num(value)?,
            "sample_every" => self.sample_every = num(value)?,
            "theta" => {
                self.theta = if value == "inf" { f64::INFINITY } else { num(value)? }
            }
            "d_low" => {
                self.d_low = if value == "inf" { usize::MAX } else { num(value)? }
            }
            "p_drop" => self.p_drop = num(value)?,
            "growth_edges_per_phase" => {
                self.growth_edges_per_phase = if value == "auto" {
                    None
                } else {
                    Some(num(value)?)
                }
            }
            "repair" => self.repair_enabled = boolean(value)?,
            "phases" => self.phases = num(value)?,
            "bootstrap_samples" => self.bootstrap_samples = num(value)?,
            "pagerank_damping" => self.pagerank_damping = num(value)?,
            "pagerank_tol" => self.pagerank_tol = num(value)?,
            "seed" => self.seed = num(value)?,
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    /// Renders the config in the same `key = value` format `parse_str`
    /// accepts, so configs echo losslessly.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let growth = match self.growth_edges_per_phase {
            Some(k) => k.to_string(),
            None => "auto".to_string(),
        };
        let d_low = if self.d_low == usize::MAX {
            "inf".to_string()
        } else {
            self.d_low.to_string()
        };
        for (k, v) in [
            ("n_target", self.n_target.to_string()),
            ("alpha", self.alpha.to_string()),
            ("beta", self.beta.to_string()),
            ("gamma", self.gamma.to_string()),
            ("delta_in", self.delta_in.to_string()),
            ("delta_out", self.delta_out.to_string()),
            ("snapshot_every", self.snapshot_every.to_string()),
            ("coupling_mode", self.coupling_mode.name().to_string()),
            ("coupling_strength", self.coupling_strength.to_string()),
            ("edge_masked", self.edge_masked.to_string()),
            ("dynamics", self.dynamics.to_string()),
            ("state_dim", self.state_dim.to_string()),
            ("h", self.h.to_string()),
            ("steps_per_phase", self.steps_per_phase.to_string()),
            ("sample_every", self.sample_every.to_string()),
            ("theta", self.theta.to_string()),
            ("d_low", d_low),
            ("p_drop", self.p_drop.to_string()),
            ("growth_edges_per_phase", growth),
            ("repair", self.repair_enabled.to_string()),
            ("phases", self.phases.to_string()),
            ("bootstrap_samples", self.bootstrap_samples.to_string()),
            ("pagerank_damping", self.pagerank_damping.to_string()),
            ("pagerank_tol", self.pagerank_tol.to_string()),
            ("seed", self.seed.to_string()),
        ] {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derives an independent seed stream from the master seed, a label and an
/// index, so toggling one component never perturbs another's randomness.
pub fn stream_seed(master: u64, label: &str, index: u64) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100000001b3);
    }
    splitmix64(master ^ h ^ index.wrapping_mul(0x9e3779b97f4a7c15))
}

/// Everything one phase produced, including the graph the next phase
/// starts from.
#[derive(Debug, Clone)]
pub struct PhaseOutput {
    pub report: PhaseReport,
    pub series: Vec<SyncSample>,
    pub events: PhaseEvents,
    pub graph_after: Graph,
    pub final_states: StateVector,
}

/// Runs one phase of the pipeline from its input topology. Pure given
/// (config, master seed, phase index, graph), which is what makes single
/// phases rerunnable in isolation.
pub fn run_phase(
    config: &ExperimentConfig,
    master_seed: u64,
    phase: usize,
    graph: Graph,
) -> Result<PhaseOutput, ExperimentError> {
    let wrap = |source: PhaseError| ExperimentError::Phase { phase, source };

    let mut state_rng = Pcg64::seed_from_u64(stream_seed(master_seed, "states", phase as u64));
    let states = StateVector::uniform(graph.node_count(), config.state_dim, -1.0, 1.0, &mut state_rng);
    let snapshot = PhaseSnapshot::new(graph, states, phase, phase as u64);

    let spec = build_centrality_coupling(
        &snapshot.graph,
        config.coupling_mode,
        config.coupling_strength,
        config.edge_masked,
    )
    .map_err(|e| wrap(e.into()))?;

    let summary = run_sync(
        &snapshot,
        &spec,
        &config.dynamics,
        config.h,
        config.steps_per_phase,
        config.sample_every,
    )
    .map_err(|e| wrap(e.into()))?;

    let rule = RewireRule {
        theta: config.theta,
        d_low: config.d_low,
        p_drop: config.p_drop,
        growth_edges_per_phase: config.growth_edges_per_phase.unwrap_or_else(|| {
            (0.02 * snapshot.graph.edge_count() as f64).ceil() as usize
        }),
    };
    let mut rewire_rng = Pcg64::seed_from_u64(stream_seed(master_seed, "rewire", phase as u64));
    let rewired = rewire_phase(&snapshot, &summary.final_states, &rule, &mut rewire_rng)
        .map_err(|e| wrap(e.into()))?;

    let isolated_before_repair = rewired.graph.isolated_nodes().len();
    let (analyzed, repaired_nodes) = if config.repair_enabled {
        let outcome = repair_isolated(&rewired.graph).map_err(|e| wrap(e.into()))?;
        (outcome.graph, outcome.repaired)
    } else {
        (rewired.graph, Vec::new())
    };

    let degrees: Vec<usize> = analyzed.projection().degrees();
    let power_law = fit_power_law(&degrees).map_err(|e| wrap(e.into()))?;
    let normal = fit_normal(&degrees).map_err(|e| wrap(e.into()))?;
    let table = centrality_table(&analyzed, config.pagerank_damping, config.pagerank_tol)
        .map_err(|e| wrap(e.into()))?;
    let mut boot_rng = Pcg64::seed_from_u64(stream_seed(master_seed, "bootstrap", phase as u64));
    let corr = correlation_matrix_with_ci(&table, config.bootstrap_samples, &mut boot_rng)
        .map_err(|e| wrap(e.into()))?;
    let classification = classify_phase(&power_law, &normal, &corr);

    let report = PhaseReport {
        phase,
        nodes: analyzed.node_count(),
        edges: analyzed.edge_count(),
        isolated_before_repair,
        power_law,
        normal,
        corr,
        verdict: classification.verdict,
        reasons: classification.reasons,
        max_pair: classification.max_pair,
    };
    let events = PhaseEvents {
        phase,
        removed_edges: rewired.removed,
        added_edges: rewired.added,
        repaired_nodes,
    };
    Ok(PhaseOutput {
        report,
        series: summary.series,
        events,
        graph_after: analyzed,
        final_states: summary.final_states,
    })
}

/// Full experiment result, reproducible from (config, seed).
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub master_seed: u64,
    pub reports: Vec<PhaseReport>,
    pub trajectories: Vec<Vec<SyncSample>>,
    pub events: Vec<PhaseEvents>,
    /// Post-repair topology per phase, i.e. what each report analyzed.
    pub analyzed_graphs: Vec<Graph>,
    /// Node/edge counts of the generator snapshots, for the manifest.
    pub growth_snapshots: Vec<(usize, usize)>,
}

/// Runs the whole pipeline: grow, then phase after phase of
/// synchronize -> rewire -> repair -> analyze.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult, ExperimentError> {
    config.validate()?;
    let master_seed = config.seed;
    let trace = grow(&config.gen_params(master_seed))?;
    let growth_snapshots = trace
        .snapshots
        .iter()
        .map(|s| (s.graph.node_count(), s.graph.edge_count()))
        .collect();

    let mut graph = trace.final_graph;
    let mut reports = Vec::with_capacity(config.phases);
    let mut trajectories = Vec::with_capacity(config.phases);
    let mut events = Vec::with_capacity(config.phases);
    let mut analyzed_graphs = Vec::with_capacity(config.phases);
    for phase in 0..config.phases {
        let out = run_phase(config, master_seed, phase, graph)?;
        graph = out.graph_after.clone();
        reports.push(out.report);
        trajectories.push(out.series);
        events.push(out.events);
        analyzed_graphs.push(out.graph_after);
    }
    Ok(ExperimentResult {
        config: config.clone(),
        master_seed,
        reports,
        trajectories,
        events,
        analyzed_graphs,
        growth_snapshots,
    })
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'a str,
    seed: u64,
    phases: usize,
    created_unix: u64,
    growth_snapshots: &'a [(usize, usize)],
    config: BTreeMap<String, String>,
}

fn atomic_write(path: &Path, contents: &str) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

/// Writes manifest, phase reports, event log and per-phase snapshots.
/// Every file is written atomically (temp file + rename). All content is
/// deterministic except the manifest timestamp.
pub fn write_artifacts(result: &ExperimentResult, dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::create_dir_all(dir.join("snapshots"))?;

    let mut config_map = BTreeMap::new();
    for line in result.config.to_config_string().lines() {
        if let Some((k, v)) = line.split_once(" = ") {
            config_map.insert(k.to_string(), v.to_string());
        }
    }
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        seed: result.master_seed,
        phases: result.reports.len(),
        created_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        growth_snapshots: &result.growth_snapshots,
        config: config_map,
    };
    atomic_write(
        &dir.join("manifest.json"),
        &serde_json::to_string_pretty(&manifest).expect("manifest serialization cannot fail"),
    )?;

    let mut reports = String::new();
    for r in &result.reports {
        let _ = writeln!(reports, "{}", r.to_json_line());
    }
    atomic_write(&dir.join("phase_reports.jsonl"), &reports)?;

    let mut ev = String::new();
    for e in &result.events {
        let _ = writeln!(ev, "{}", serde_json::to_string(e).expect("event serialization"));
    }
    atomic_write(&dir.join("events.jsonl"), &ev)?;

    for (p, g) in result.analyzed_graphs.iter().enumerate() {
        atomic_write(
            &dir.join("snapshots").join(format!("phase_{p:04}.edges")),
            &g.to_edge_list_string(),
        )?;
    }
    Ok(())
}

/// Emits plot-ready data: per-phase degree histograms, fitted CCDF curves
/// and sync-error series, plus a phases overview.
pub fn emit_plot_data(result: &ExperimentResult, dir: &Path) -> io::Result<()> {
    let plots = dir.join("plots");
    let traj = dir.join("trajectories");
    fs::create_dir_all(&plots)?;
    fs::create_dir_all(&traj)?;

    let mut overview = String::from("phase,verdict,alpha_hat,deg_bet_corr\n");
    for (p, report) in result.reports.iter().enumerate() {
        let g = &result.analyzed_graphs[p];
        let hist = degree_histogram(g);
        let mut hist_csv = String::from("degree,count\n");
        for (d, c) in &hist {
            let _ = writeln!(hist_csv, "{d},{c}");
        }
        atomic_write(&plots.join(format!("phase_{p:04}_degree_hist.csv")), &hist_csv)?;

        let n: usize = hist.values().sum();
        let pl = &report.power_law;
        let nf = &report.normal;
        let tail_fraction = pl.n_tail as f64 / n as f64;
        let b = (pl.k_min as f64 - 0.5).max(1.0);
        let mut ccdf_csv = String::from("degree,empirical_ccdf,power_law_ccdf,normal_ccdf\n");
        let mut at_or_above = n;
        for (&d, &c) in &hist {
            let emp = at_or_above as f64 / n as f64;
            let model_pl = if d >= pl.k_min {
                let m = ((d as f64 - 0.5).max(b) / b).powf(-(pl.alpha_hat - 1.0));
                format!("{}", tail_fraction * m)
            } else {
                String::new()
            };
            let model_norm = if nf.degenerate {
                String::new()
            } else {
                let z = (d as f64 - nf.mu) / (nf.sigma * std::f64::consts::SQRT_2);
                format!("{}", 0.5 * (1.0 - erf_for_plot(z)))
            };
            let _ = writeln!(ccdf_csv, "{d},{emp},{model_pl},{model_norm}");
            at_or_above -= c;
        }
        atomic_write(&plots.join(format!("phase_{p:04}_ccdf.csv")), &ccdf_csv)?;

        atomic_write(
            &traj.join(format!("phase_{p:04}.csv")),
            &trajectory_csv_string(&result.trajectories[p]),
        )?;

        let db = report.corr.get(crate::analysis::Measure::Degree, crate::analysis::Measure::Betweenness);
        let _ = writeln!(
            overview,
            "{},{},{},{}",
            p,
            report.verdict.name(),
            report.power_law.alpha_hat,
            db
        );
    }
    atomic_write(&plots.join("overview.csv"), &overview)
}

// Same approximation as the analysis module's; duplicated privately to keep
// plot emission independent of fit internals.
fn erf_for_plot(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592
            + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    sign * (1.0 - poly * (-x * x).exp())
}
