//! Python bindings: graph construction, generation, centralities,
//! distribution fits, synchronization and full experiment runs.

use std::collections::HashMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use rand::SeedableRng;
use rand_pcg::Pcg64;
use sfnet_core as core;
use sfnet_core::{CouplingMode, LocalDynamics, PhaseSnapshot, StateVector};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// Directed multigraph with dense integer node ids.
#[pyclass(name = "Graph")]
#[derive(Clone)]
struct PyGraph {
    inner: core::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    #[pyo3(signature = (nodes = 0))]
    fn new(nodes: usize) -> Self {
        Self {
            inner: core::Graph::with_nodes(nodes),
        }
    }

    #[staticmethod]
    fn from_edge_list(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: core::Graph::from_edge_list_str(text).map_err(value_err)?,
        })
    }

    fn to_edge_list(&self) -> String {
        self.inner.to_edge_list_string()
    }

    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn add_node(&mut self) -> usize {
        self.inner.add_node()
    }

    fn add_edge(&mut self, u: usize, v: usize) -> PyResult<usize> {
        self.inner.add_edge(u, v).map_err(value_err)
    }

    fn remove_edge(&mut self, edge: usize) -> PyResult<()> {
        self.inner.remove_edge(edge).map_err(value_err)
    }

    fn edges(&self) -> Vec<(usize, usize, usize)> {
        self.inner.edges().collect()
    }

    fn total_degree(&self, v: usize) -> PyResult<usize> {
        if v >= self.inner.node_count() {
            return Err(value_err(format!("unknown node {v}")));
        }
        Ok(self.inner.total_degree(v))
    }

    fn isolated_nodes(&self) -> Vec<usize> {
        self.inner.isolated_nodes()
    }

    fn max_degree_hub(&self) -> PyResult<usize> {
        self.inner.max_degree_hub().map_err(value_err)
    }

    /// Total-degree counts on the undirected projection, as {degree: count}.
    fn degree_histogram(&self) -> HashMap<usize, usize> {
        core::degree_histogram(&self.inner).into_iter().collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(nodes={}, edges={})",
            self.inner.node_count(),
            self.inner.edge_count()
        )
    }
}

/// Grows a directed scale-free graph by preferential attachment. When
/// `export_dir` is given, every growth snapshot is written there as an
/// edge list along with a JSON-lines manifest.
#[pyfunction]
#[pyo3(signature = (n_target, alpha = 0.41, beta = 0.54, gamma = 0.05, delta_in = 0.2, delta_out = 0.0, seed = 42, snapshot_every = 500, export_dir = None))]
#[allow(clippy::too_many_arguments)]
fn generate(
    n_target: usize,
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta_in: f64,
    delta_out: f64,
    seed: u64,
    snapshot_every: usize,
    export_dir: Option<String>,
) -> PyResult<PyGraph> {
    let params = core::GenParams {
        alpha,
        beta,
        gamma,
        delta_in,
        delta_out,
        n_target,
        seed,
        snapshot_every,
    };
    let trace = core::grow(&params).map_err(value_err)?;
    if let Some(dir) = export_dir {
        core::export_trace(&trace, std::path::Path::new(&dir)).map_err(runtime_err)?;
    }
    Ok(PyGraph {
        inner: trace.final_graph,
    })
}

#[pyfunction]
fn degree_centrality(g: &PyGraph) -> PyResult<Vec<f64>> {
    core::degree_centrality(&g.inner).map_err(value_err)
}

#[pyfunction]
#[pyo3(signature = (g, damping = 0.85, tol = 1e-10, max_iter = 100_000))]
fn pagerank_centrality(g: &PyGraph, damping: f64, tol: f64, max_iter: usize) -> PyResult<Vec<f64>> {
    Ok(core::pagerank_centrality(&g.inner, damping, tol, max_iter)
        .map_err(runtime_err)?
        .values)
}

#[pyfunction]
fn betweenness_centrality(g: &PyGraph) -> PyResult<Vec<f64>> {
    core::betweenness_centrality(&g.inner).map_err(value_err)
}

#[pyfunction]
fn brute_force_betweenness(g: &PyGraph) -> PyResult<Vec<f64>> {
    core::brute_force_betweenness(&g.inner).map_err(value_err)
}

#[pyfunction]
fn closeness_centrality(g: &PyGraph) -> PyResult<Vec<f64>> {
    core::closeness_centrality(&g.inner).map_err(value_err)
}

/// All four measures as {"degree": [...], "pagerank": [...], ...}.
#[pyfunction]
#[pyo3(signature = (g, damping = 0.85, tol = 1e-10))]
fn centrality_table<'py>(
    py: Python<'py>,
    g: &PyGraph,
    damping: f64,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let t = core::centrality_table(&g.inner, damping, tol).map_err(runtime_err)?;
    let out = PyDict::new_bound(py);
    out.set_item("degree", t.degree)?;
    out.set_item("pagerank", t.pagerank)?;
    out.set_item("betweenness", t.betweenness)?;
    out.set_item("closeness", t.closeness)?;
    out.set_item("pagerank_dangling", t.pagerank_dangling)?;
    Ok(out)
}

#[pyfunction]
fn fit_power_law<'py>(py: Python<'py>, degrees: Vec<usize>) -> PyResult<Bound<'py, PyDict>> {
    let fit = core::fit_power_law(&degrees).map_err(value_err)?;
    let out = PyDict::new_bound(py);
    out.set_item("alpha_hat", fit.alpha_hat)?;
    out.set_item("k_min", fit.k_min)?;
    out.set_item("ks_stat", fit.ks_stat)?;
    out.set_item("n_tail", fit.n_tail)?;
    Ok(out)
}

#[pyfunction]
fn fit_normal<'py>(py: Python<'py>, degrees: Vec<usize>) -> PyResult<Bound<'py, PyDict>> {
    let fit = core::fit_normal(&degrees).map_err(value_err)?;
    let out = PyDict::new_bound(py);
    out.set_item("mu", fit.mu)?;
    out.set_item("sigma", fit.sigma)?;
    out.set_item("ks_stat", fit.ks_stat)?;
    out.set_item("degenerate", fit.degenerate)?;
    Ok(out)
}

#[pyfunction]
fn pearson_correlation(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    core::pearson_correlation(&x, &y).map_err(value_err)
}

/// Synchronizes uniform random states over the graph under the given
/// coupling mode; returns the sampled sync-error series.
#[pyfunction]
#[pyo3(signature = (g, mode = "explicit", strength = 1.0, steps = 1000, h = 0.01, seed = 42, edge_masked = true, sample_every = 50))]
#[allow(clippy::too_many_arguments)]
fn synchronize<'py>(
    py: Python<'py>,
    g: &PyGraph,
    mode: &str,
    strength: f64,
    steps: u64,
    h: f64,
    seed: u64,
    edge_masked: bool,
    sample_every: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let mode = CouplingMode::parse(mode).map_err(value_err)?;
    let spec = core::build_centrality_coupling(&g.inner, mode, strength, edge_masked)
        .map_err(runtime_err)?;
    let mut rng = Pcg64::seed_from_u64(seed);
    let states = StateVector::uniform(g.inner.node_count(), 1, -1.0, 1.0, &mut rng);
    let snapshot = PhaseSnapshot::new(g.inner.clone(), states, 0, 0);
    let summary = core::run_sync(&snapshot, &spec, &LocalDynamics::Zero, h, steps, sample_every)
        .map_err(runtime_err)?;
    let out = PyDict::new_bound(py);
    out.set_item(
        "steps",
        summary.series.iter().map(|s| s.step).collect::<Vec<_>>(),
    )?;
    out.set_item(
        "sync_error",
        summary
            .series
            .iter()
            .map(|s| s.sync_error)
            .collect::<Vec<_>>(),
    )?;
    out.set_item("final_sync_error", summary.final_states.spread())?;
    Ok(out)
}

fn report_to_dict<'py>(py: Python<'py>, report: &core::PhaseReport) -> PyResult<Bound<'py, PyDict>> {
    let json: serde_json::Value = serde_json::from_str(&report.to_json_line())
        .expect("report json is valid");
    json_to_py(py, &json)?.downcast_into().map_err(|e| e.into())
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    use serde_json::Value;
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_py(py).into_bound(py),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_py(py).into_bound(py)
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_py(py).into_bound(py)
            }
        }
        Value::String(s) => s.into_py(py).into_bound(py),
        Value::Array(items) => {
            let list = PyList::empty_bound(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new_bound(py);
            for (k, val) in map {
                dict.set_item(k, json_to_py(py, val)?)?;
            }
            dict.into_any()
        }
    })
}

/// Runs a full experiment. `config` holds string key-value overrides using
/// the config-file schema; missing keys take their defaults. When `out_dir`
/// is given, all artifacts and plot data are written there. Returns the
/// phase reports as dicts.
#[pyfunction]
#[pyo3(signature = (config = None, out_dir = None))]
fn run_experiment<'py>(
    py: Python<'py>,
    config: Option<HashMap<String, String>>,
    out_dir: Option<String>,
) -> PyResult<Bound<'py, PyList>> {
    let mut text = String::new();
    if let Some(map) = config {
        let mut items: Vec<_> = map.into_iter().collect();
        items.sort();
        for (k, v) in items {
            text.push_str(&format!("{k} = {v}\n"));
        }
    }
    let cfg = core::ExperimentConfig::parse_str(&text).map_err(value_err)?;
    cfg.validate().map_err(value_err)?;
    let result = core::run_experiment(&cfg).map_err(runtime_err)?;
    if let Some(dir) = out_dir {
        let dir = std::path::PathBuf::from(dir);
        core::write_artifacts(&result, &dir).map_err(runtime_err)?;
        core::emit_plot_data(&result, &dir).map_err(runtime_err)?;
    }
    let reports = PyList::empty_bound(py);
    for report in &result.reports {
        reports.append(report_to_dict(py, report)?)?;
    }
    Ok(reports)
}

#[pymodule]
fn sfnet(_py: Python<'_>, m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(degree_centrality, m)?)?;
    m.add_function(wrap_pyfunction!(pagerank_centrality, m)?)?;
    m.add_function(wrap_pyfunction!(betweenness_centrality, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_betweenness, m)?)?;
    m.add_function(wrap_pyfunction!(closeness_centrality, m)?)?;
    m.add_function(wrap_pyfunction!(centrality_table, m)?)?;
    m.add_function(wrap_pyfunction!(fit_power_law, m)?)?;
    m.add_function(wrap_pyfunction!(fit_normal, m)?)?;
    m.add_function(wrap_pyfunction!(pearson_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(synchronize, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
