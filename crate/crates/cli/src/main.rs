//! Command-line front end.
//!
//! Exit codes: 0 success, 1 config error, 2 runtime error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_pcg::Pcg64;
use sfnet_core::{
    brute_force_betweenness, centrality_table, classify_phase, correlation_matrix_with_ci,
    degree_histogram, emit_plot_data, fit_normal, fit_power_law, run_experiment, write_artifacts,
    CouplingMode, ExperimentConfig, Graph, PhaseReport,
};

#[derive(Parser)]
#[command(name = "sfnet", about = "Dynamic scale-free network synchronization toolkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a full experiment from a config file and write all artifacts.
    Run(RunArgs),
    /// Re-analyze stored edge-list snapshots without resimulating.
    Analyze(AnalyzeArgs),
    /// Brute-force betweenness oracle for small edge lists.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat key-value config file (see README for the schema).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for reports, snapshots and plot data.
    #[arg(long)]
    out: PathBuf,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's phase count.
    #[arg(long)]
    phases: Option<usize>,
    /// Override the coupling mode
    /// (explicit|degree|pagerank|betweenness|closeness).
    #[arg(long)]
    coupling: Option<String>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Directory of *.edges snapshots (analyzed in filename order).
    #[arg(long)]
    snapshots: PathBuf,
    /// Optional directory for report files; reports also print to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Bootstrap resamples for correlation confidence intervals.
    #[arg(long, default_value_t = 0)]
    bootstrap: usize,
    /// Seed for the bootstrap resampling stream.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Pagerank damping for the centrality table.
    #[arg(long, default_value_t = 0.85)]
    damping: f64,
}

#[derive(Args)]
struct OracleArgs {
    /// Edge-list file to evaluate with the exhaustive algorithm.
    #[arg(long = "betweenness")]
    betweenness: PathBuf,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Analyze(args) => analyze(args),
        Command::Oracle(args) => oracle(args),
    }
}

const CONFIG_ERROR: u8 = 1;
const RUNTIME_ERROR: u8 = 2;

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

// False when stdout is gone (e.g. piped into `head`); callers stop printing
// but still finish their file writes.
fn print_line(line: &str) -> bool {
    use std::io::Write;
    writeln!(std::io::stdout(), "{line}").is_ok()
}

fn run(args: RunArgs) -> ExitCode {
    let text = match fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => return fail(CONFIG_ERROR, format!("{}: {e}", args.config.display())),
    };
    let mut config = match ExperimentConfig::parse_str(&text) {
        Ok(c) => c,
        Err(e) => return fail(CONFIG_ERROR, e),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(phases) = args.phases {
        config.phases = phases;
    }
    if let Some(mode) = args.coupling {
        match CouplingMode::parse(&mode) {
            Ok(m) => config.coupling_mode = m,
            Err(e) => return fail(CONFIG_ERROR, e),
        }
    }
    if let Err(e) = config.validate() {
        return fail(CONFIG_ERROR, e);
    }
    let result = match run_experiment(&config) {
        Ok(r) => r,
        Err(e) => return fail(RUNTIME_ERROR, e),
    };
    if let Err(e) =
        write_artifacts(&result, &args.out).and_then(|_| emit_plot_data(&result, &args.out))
    {
        return fail(RUNTIME_ERROR, e);
    }
    let fluctuated = result
        .reports
        .iter()
        .filter(|r| r.verdict == sfnet_core::Verdict::Fluctuated)
        .count();
    println!(
        "{} phases analyzed ({} fluctuated), artifacts in {}",
        result.reports.len(),
        fluctuated,
        args.out.display()
    );
    ExitCode::SUCCESS
}

fn analyze(args: AnalyzeArgs) -> ExitCode {
    let entries = match fs::read_dir(&args.snapshots) {
        Ok(it) => it,
        Err(e) => return fail(CONFIG_ERROR, format!("{}: {e}", args.snapshots.display())),
    };
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "edges"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return fail(CONFIG_ERROR, "no .edges files found");
    }
    let mut lines = String::new();
    let mut stdout_open = true;
    for (phase, path) in paths.iter().enumerate() {
        let graph = match Graph::read_edge_list(path) {
            Ok(g) => g,
            Err(e) => return fail(RUNTIME_ERROR, format!("{}: {e}", path.display())),
        };
        let report = match analyze_one(&graph, phase, &args) {
            Ok(r) => r,
            Err(e) => return fail(RUNTIME_ERROR, format!("{}: {e}", path.display())),
        };
        let line = report.to_json_line();
        if stdout_open {
            stdout_open = print_line(&line);
        }
        lines.push_str(&line);
        lines.push('\n');
    }
    if let Some(out) = &args.out {
        if let Err(e) =
            fs::create_dir_all(out).and_then(|_| fs::write(out.join("phase_reports.jsonl"), &lines))
        {
            return fail(RUNTIME_ERROR, e);
        }
    }
    ExitCode::SUCCESS
}

fn analyze_one(
    graph: &Graph,
    phase: usize,
    args: &AnalyzeArgs,
) -> Result<PhaseReport, Box<dyn std::error::Error>> {
    let degrees: Vec<usize> = degree_histogram(graph)
        .into_iter()
        .flat_map(|(d, c)| std::iter::repeat(d).take(c))
        .collect();
    let power_law = fit_power_law(&degrees)?;
    let normal = fit_normal(&degrees)?;
    let table = centrality_table(graph, args.damping, 1e-10)?;
    let mut rng =
        Pcg64::seed_from_u64(sfnet_core::stream_seed(args.seed, "bootstrap", phase as u64));
    let corr = correlation_matrix_with_ci(&table, args.bootstrap, &mut rng)?;
    let classification = classify_phase(&power_law, &normal, &corr);
    Ok(PhaseReport {
        phase,
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        isolated_before_repair: graph.isolated_nodes().len(),
        power_law,
        normal,
        corr,
        verdict: classification.verdict,
        reasons: classification.reasons,
        max_pair: classification.max_pair,
    })
}

fn oracle(args: OracleArgs) -> ExitCode {
    let graph = match Graph::read_edge_list(&args.betweenness) {
        Ok(g) => g,
        Err(e) => return fail(CONFIG_ERROR, format!("{}: {e}", args.betweenness.display())),
    };
    let values = match brute_force_betweenness(&graph) {
        Ok(v) => v,
        Err(e) => return fail(RUNTIME_ERROR, e),
    };
    if print_line("node_id,betweenness_c") {
        for (v, b) in values.iter().enumerate() {
            if !print_line(&format!("{v},{b}")) {
                break;
            }
        }
    }
    ExitCode::SUCCESS
}
