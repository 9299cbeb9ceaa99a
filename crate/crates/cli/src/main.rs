//! `oap` — generate instances, run single simulations, sweep the
//! benchmark grid, and compare results against the analytic bounds.
//!
//! Exit codes: 0 on success, 1 on runtime failures (I/O, parse,
//! infeasible parameters), 2 on usage errors.

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use oap_core::{
    experiment::TrialFailure, make_advice, parse_orlib, report, run_sweep, solve_exact,
    Algorithm, CostMatrix, InstanceMeta, InstanceSource, PerturbationSpec, SweepGrid,
    TrialRecord, Weight,
};
use serde::Serialize;
use std::path::{Path, PathBuf};

/// Default output directory environment variable.
const OUT_DIR_ENV: &str = "OAP_OUT_DIR";

#[derive(Parser)]
#[command(name = "oap", version, about = "Online assignment benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a uniform random instance in OR-Library format.
    Gen(GenArgs),
    /// Solve an instance exactly and print the offline optimum.
    Solve(SolveArgs),
    /// Run one perturbed trial and report costs, ratios and timings.
    Simulate(SimulateArgs),
    /// Sweep the (n, ε, μ, seed) grid and write CSV/JSON artifacts.
    Sweep(SweepArgs),
    /// Render the bound-comparison table from sweep artifacts.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Instance size (servers per side).
    #[arg(long)]
    n: usize,
    /// Smallest weight, inclusive.
    #[arg(long, default_value_t = 1)]
    lo: Weight,
    /// Largest weight, inclusive.
    #[arg(long, default_value_t = 100)]
    hi: Weight,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// OR-Library instance file.
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct SimulateArgs {
    /// OR-Library instance file.
    #[arg(long)]
    instance: PathBuf,
    /// Fraction of cells perturbed, in [0, 1].
    #[arg(long)]
    epsilon: f64,
    /// Magnitude as a fraction of max(A), in [0, 1].
    #[arg(long)]
    mu: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Algorithms to run.
    #[arg(long, value_delimiter = ',', default_values_t = Algorithm::ALL.map(AlgorithmArg))]
    algorithms: Vec<AlgorithmArg>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write the advice audit document (JSON) here.
    #[arg(long)]
    advice_out: Option<PathBuf>,
    /// Write the predicted matrix (OR-Library format) here.
    #[arg(long)]
    predicted_out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Grid sizes; synthetic sources generate one instance per size.
    #[arg(long, value_delimiter = ',', default_values_t = vec![100, 200, 300, 400, 500, 600, 700, 800])]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5])]
    epsilons: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 0.3, 0.5])]
    mus: Vec<f64>,
    /// Seeds per grid cell.
    #[arg(long, default_value_t = 30)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Smallest synthetic weight.
    #[arg(long, default_value_t = 1)]
    lo: Weight,
    /// Largest synthetic weight.
    #[arg(long, default_value_t = 100)]
    hi: Weight,
    /// OR-Library files to sweep instead of synthetic instances.
    #[arg(long, value_delimiter = ',')]
    files: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', default_values_t = Algorithm::ALL.map(AlgorithmArg))]
    algorithms: Vec<AlgorithmArg>,
    /// Worker threads for the trial pool; defaults to all cores.
    #[arg(long)]
    jobs: Option<usize>,
    /// Artifact directory; defaults to $OAP_OUT_DIR, then ./oap-sweep.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Directory holding sweep artifacts (needs summary.csv).
    #[arg(long)]
    dir: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

/// clap-friendly wrapper around the core enum.
#[derive(Clone, Copy, PartialEq, Eq)]
struct AlgorithmArg(Algorithm);

impl std::fmt::Display for AlgorithmArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl std::str::FromStr for AlgorithmArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse::<Algorithm>()
            .map(AlgorithmArg)
            .map_err(|e| e.to_string())
    }
}

enum AppError {
    /// Bad arguments; exits 2 like clap's own validation.
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for AppError {
    fn from(err: anyhow::Error) -> Self {
        AppError::Runtime(err)
    }
}

fn usage(msg: impl Into<String>) -> AppError {
    AppError::Usage(msg.into())
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Report(args) => cmd_report(args),
    };
    match outcome {
        Ok(()) => {}
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
        Err(AppError::Runtime(err)) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}

fn cmd_gen(args: GenArgs) -> Result<(), AppError> {
    if args.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    if args.lo > args.hi {
        return Err(usage(format!("--lo {} exceeds --hi {}", args.lo, args.hi)));
    }
    if args.lo < 0 {
        return Err(usage("--lo must be nonnegative"));
    }
    let matrix = oap_core::generate_uniform(args.n, args.lo, args.hi, args.seed)
        .map_err(|e| AppError::Runtime(e.into()))?;
    match &args.out {
        Some(path) => {
            std::fs::write(path, matrix.render())
                .with_context(|| format!("writing {}", path.display()))?;
        }
        None => print!("{}", matrix.render()),
    }
    Ok(())
}

fn load_instance(path: &Path) -> Result<CostMatrix, AppError> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(AppError::Runtime)?;
    parse_orlib(&text)
        .map_err(|e| AppError::Runtime(anyhow!(e).context(format!("parsing {}", path.display()))))
}

fn cmd_solve(args: SolveArgs) -> Result<(), AppError> {
    let matrix = load_instance(&args.instance)?;
    let solution = solve_exact(&matrix);
    match args.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Solved<'a> {
                n: usize,
                opt_cost: Weight,
                server_of: &'a [usize],
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&Solved {
                    n: matrix.n(),
                    opt_cost: solution.total_cost,
                    server_of: &solution.server_of,
                })
                .expect("serializable")
            );
        }
        Format::Table => {
            println!("n:        {}", matrix.n());
            println!("opt cost: {}", solution.total_cost);
        }
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), AppError> {
    let spec = PerturbationSpec::new(args.epsilon, args.mu, args.seed)
        .map_err(|e| usage(e.to_string()))?;
    if args.algorithms.is_empty() {
        return Err(usage("--algorithms must not be empty"));
    }
    let matrix = load_instance(&args.instance)?;
    let algorithms: Vec<Algorithm> = args.algorithms.iter().map(|a| a.0).collect();

    // The advice is rebuilt identically inside the trial; this copy feeds
    // the emitters and the human-readable error line.
    let advice = make_advice(&matrix, spec).map_err(|e| AppError::Runtime(e.into()))?;
    if let Some(path) = &args.advice_out {
        let doc = serde_json::to_string_pretty(&advice.to_document()).expect("serializable");
        std::fs::write(path, doc).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &args.predicted_out {
        std::fs::write(path, advice.predicted.render())
            .with_context(|| format!("writing {}", path.display()))?;
    }

    let record = oap_core::run_trial(&matrix, spec, &algorithms, 0.0)
        .map_err(|e| AppError::Runtime(e.into()))?;
    match args.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&record).expect("serializable")
        ),
        Format::Table => print_trial_table(&record, &advice),
    }
    Ok(())
}

fn print_trial_table(record: &TrialRecord, advice: &oap_core::AdviceRecord) {
    println!(
        "instance: n = {}, epsilon = {}, mu = {}, seed = {}",
        record.n, record.epsilon, record.mu, record.seed
    );
    println!("opt cost: {}", record.opt_cost);
    println!(
        "advice error: E = {} (delta {}, {} cells{})",
        record.total_error,
        advice.per_cell_delta,
        advice.perturbed_cells(),
        if advice.degenerate_magnitude {
            ", degenerate magnitude: perturbation is a no-op"
        } else {
            ""
        }
    );
    println!("{:<20} {:>12} {:>10}", "algorithm", "cost", "ratio");
    for (algorithm, cost) in &record.alg_costs {
        println!(
            "{:<20} {:>12} {:>10.4}",
            algorithm.to_string(),
            cost,
            record.ratios[algorithm]
        );
    }
    println!("timings (seconds)");
    for (phase, seconds) in &record.timings {
        println!("  {phase:<26} {seconds:.6}");
    }
}

/// Sweep provenance: everything needed to re-run plus the one volatile
/// field (the timestamp), kept out of the CSV artifacts.
#[derive(Serialize)]
struct Provenance<'a> {
    version: &'static str,
    created_unix_seconds: u64,
    grid: &'a SweepGrid,
    instances: &'a [InstanceMeta],
    failed_trials: &'a [TrialFailure],
}

fn cmd_sweep(args: SweepArgs) -> Result<(), AppError> {
    let source = if args.files.is_empty() {
        InstanceSource::Synthetic {
            lo: args.lo,
            hi: args.hi,
        }
    } else {
        InstanceSource::Files {
            paths: args.files.clone(),
        }
    };
    let grid = SweepGrid {
        sizes: args.sizes,
        epsilons: args.epsilons,
        mus: args.mus,
        trials: args.trials,
        base_seed: args.seed,
        source,
        algorithms: args.algorithms.iter().map(|a| a.0).collect(),
    };
    grid.validate().map_err(|e| usage(e.to_string()))?;

    let result = match args.jobs {
        Some(jobs) if jobs > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .context("building worker pool")?
            .install(|| run_sweep(&grid)),
        Some(_) => return Err(usage("--jobs must be at least 1")),
        None => run_sweep(&grid),
    }
    .map_err(|e| AppError::Runtime(e.into()))?;

    let out_dir = args
        .out_dir
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("oap-sweep"));
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;

    let write = |name: &str, contents: String| -> Result<(), AppError> {
        let path = out_dir.join(name);
        std::fs::write(&path, contents)
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    };
    write("trials.csv", report::raw_trials_csv(&result))?;
    write("summary.csv", report::summary_csv(&result))?;
    write("timings.csv", report::timings_csv(&result))?;
    write("error_graph.csv", report::error_graph_csv(&result))?;
    write("size_graph.csv", report::size_graph_csv(&result))?;
    write("bounds_overlay.csv", report::bounds_overlay_csv(&result))?;

    let provenance = Provenance {
        version: env!("CARGO_PKG_VERSION"),
        created_unix_seconds: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        grid: &result.grid,
        instances: &result.instances,
        failed_trials: &result.failures,
    };
    write(
        "provenance.json",
        serde_json::to_string_pretty(&provenance).expect("serializable"),
    )?;

    println!(
        "sweep complete: {} trials, {} failed cells, artifacts in {}",
        result.records.len(),
        result.failures.len(),
        out_dir.display()
    );
    for failure in &result.failures {
        eprintln!(
            "failed: n={} epsilon={} mu={} seed={}: {}",
            failure.n, failure.epsilon, failure.mu, failure.seed, failure.message
        );
    }
    if result.all_failed() {
        return Err(AppError::Runtime(anyhow!("every sweep trial failed")));
    }
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<(), AppError> {
    let path = args.dir.join("summary.csv");
    let text = std::fs::read_to_string(&path)
        .with_context(|| format!("reading {}", path.display()))?;
    let summaries = report::parse_summary_csv(&text).map_err(|e| AppError::Runtime(e.into()))?;
    print!("{}", report::bound_table(&summaries));
    Ok(())
}
