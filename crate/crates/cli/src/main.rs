mod commands;
mod repro;

use std::fmt;
use std::net::{IpAddr, Ipv4Addr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use llm_roi_core::econ::{BinaryVariant, SolveFor, SweepVariable};
use llm_roi_core::io::OutputFormat;
use llm_roi_core::sensitivity::{CostUnits, Target};

#[derive(Parser)]
#[command(name = "llm-roi", version, about = "Earnings, RoI, break-even and sensitivity analysis for LLM deployments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Earnings and RoI of every scenario in a file.
    Evaluate(EvaluateArgs),
    /// Evaluate two or more scenarios and report pairwise deltas.
    Compare(EvaluateArgs),
    /// Solve for the value at which two scenarios earn the same.
    Breakeven(BreakevenArgs),
    /// Sweep one variable over a range for every scenario.
    Sweep(SweepArgs),
    /// Global variance-based sensitivity indices for a spec file.
    Sobol(SobolArgs),
    /// Analytic gradient and Hessian at a scenario's point.
    LocalSens(LocalArgs),
    /// Run the HTTP service until interrupted.
    Serve(ServeArgs),
    /// Regenerate the example table, the sweep chart and all Sobol charts.
    Repro(ReproArgs),
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, default_value = "json")]
    format: OutputFormat,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Restrict to these scenarios (repeatable).
    #[arg(long)]
    name: Vec<String>,
    #[arg(long, default_value = "canonical")]
    variant: BinaryVariant,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct BreakevenArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    solve_for: SolveFor,
    /// Reference scenario; the first single-outcome scenario by default.
    #[arg(long)]
    reference: Option<String>,
    /// Candidate scenario; the second single-outcome scenario by default.
    #[arg(long)]
    candidate: Option<String>,
    /// Set a variable on both scenarios first, e.g. `T=128000` (repeatable).
    #[arg(long, value_parser = parse_assignment)]
    at: Vec<(SweepVariable, f64)>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    name: Vec<String>,
    #[arg(long)]
    var: SweepVariable,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    #[arg(long, default_value_t = 101)]
    steps: usize,
    /// Also write an SVG line chart here.
    #[arg(long)]
    chart: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SobolArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    samples_exponent: Option<u32>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    second_order: Option<bool>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    bootstrap: Option<usize>,
    #[arg(long)]
    variant: Option<BinaryVariant>,
    #[arg(long)]
    cost_units: Option<CostUnits>,
    /// Also write index bar and second-order heatmap charts here.
    #[arg(long)]
    chart_dir: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct LocalArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Scenario to analyse; the first one by default.
    #[arg(long)]
    name: Option<String>,
    #[arg(long, default_value = "earnings")]
    target: Target,
    #[arg(long, default_value = "canonical")]
    variant: BinaryVariant,
    #[arg(long, default_value = "per-million")]
    cost_units: CostUnits,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value_t = llm_roi_service::DEFAULT_PORT)]
    port: u16,
    #[arg(long, default_value_t = IpAddr::V4(Ipv4Addr::LOCALHOST))]
    bind: IpAddr,
    /// Sobol jobs allowed to run at once.
    #[arg(long, default_value_t = 1)]
    max_jobs: usize,
    /// Specs needing fewer evaluations than this answer synchronously.
    #[arg(long, default_value_t = llm_roi_service::DEFAULT_SYNC_THRESHOLD)]
    sync_threshold: u64,
    /// Seconds a finished job stays pollable.
    #[arg(long, default_value_t = 3600)]
    retention_secs: u64,
}

#[derive(Args)]
struct ReproArgs {
    /// Output directory.
    #[arg(long, default_value = "repro")]
    out: PathBuf,
    /// Use 2^20 base samples instead of 2^16.
    #[arg(long)]
    full: bool,
    #[arg(long, conflicts_with = "full")]
    samples_exponent: Option<u32>,
    /// Scenario file for the example table and sweep; the bundled one by default.
    #[arg(long)]
    scenario: Option<PathBuf>,
}

fn parse_assignment(s: &str) -> Result<(SweepVariable, f64), String> {
    let (var, value) = s.split_once('=').ok_or_else(|| format!("expected VAR=VALUE, got `{s}`"))?;
    let var: SweepVariable = var.trim().parse().map_err(|e: llm_roi_core::Error| e.to_string())?;
    let value: f64 = value.trim().parse().map_err(|e| format!("bad value in `{s}`: {e}"))?;
    Ok((var, value))
}

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Engine(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Engine(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Engine(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<llm_roi_core::Error> for CliError {
    fn from(e: llm_roi_core::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Engine(e.to_string())
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("LLM_ROI_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| CliError::Input(format!("LLM_ROI_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Engine(format!("cannot start {n} worker threads: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Evaluate(a) => commands::evaluate(&a, false),
        Command::Compare(a) => commands::evaluate(&a, true),
        Command::Breakeven(a) => commands::breakeven(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Sobol(a) => commands::sobol(&a),
        Command::LocalSens(a) => commands::local_sensitivity(&a),
        Command::Serve(a) => commands::serve(&a),
        Command::Repro(a) => repro::run(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let default_level = if matches!(cli.command, Command::Serve(_)) { "info" } else { "warn" };
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new(default_level)),
        )
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("llm-roi: error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
