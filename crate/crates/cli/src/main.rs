//! `relaxsim`: runs the asymptotic-preserving scheme and its diffusion
//! limits from the command line and writes tidy CSV.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "relaxsim", version, about = "Asymptotic-preserving solvers for stiff relaxation systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scheme and write snapshots, entropy and step logs.
    #[command(allow_negative_numbers = true)]
    Run(RunArgs),
    /// Solve the limit diffusion equation for the same configuration.
    #[command(allow_negative_numbers = true)]
    Reference {
        #[command(flatten)]
        run: RunArgs,
        /// Solve on a grid refined by this integer factor.
        #[arg(long, default_value_t = 1)]
        refine: usize,
    },
    /// Compare two snapshot files at their common times.
    Compare(CompareArgs),
    /// Run a named experiment end to end: scheme, reference and comparison.
    #[command(allow_negative_numbers = true)]
    Preset(PresetArgs),
    /// Check a configuration and the model's structural assumptions.
    #[command(allow_negative_numbers = true)]
    Validate {
        #[command(flatten)]
        run: RunArgs,
        /// Number of random samples for the structural check.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

/// Configuration flags; any flag overrides the value from `--config`.
#[derive(Args, Clone, Default)]
pub struct RunArgs {
    /// JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Model name (euler-friction, m1, coupled-euler-m1, shallow-water).
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub cells: Option<usize>,
    #[arg(long)]
    pub dx: Option<f64>,
    #[arg(long)]
    pub x0: Option<f64>,
    /// neumann or periodic.
    #[arg(long)]
    pub boundary: Option<String>,
    #[arg(long)]
    pub cfl: Option<f64>,
    #[arg(long)]
    pub safety: Option<f64>,
    #[arg(long)]
    pub t_final: Option<f64>,
    /// Extra snapshot times, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub snapshot_times: Option<Vec<f64>>,
    /// Output directory.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Record entropy every this many steps.
    #[arg(long)]
    pub diagnostics_every: Option<usize>,
    /// Use one wave speed, the maximum over interfaces, per step.
    #[arg(long)]
    pub uniform_speed: bool,
}

#[derive(Args)]
pub struct CompareArgs {
    pub first: PathBuf,
    pub second: PathBuf,
    /// Norms to print: l1, l2, linf, rel-l1 (default: all).
    #[arg(long, value_delimiter = ',')]
    pub norm: Vec<String>,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args)]
pub struct PresetArgs {
    /// Preset name; omit with --list.
    pub name: Option<String>,
    /// List the available presets.
    #[arg(long)]
    pub list: bool,
    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("RELAXSIM_THREADS") else { return Ok(()) };
    let n: usize = v.parse().map_err(|_| format!("RELAXSIM_THREADS: expected a positive integer, got '{v}'"))?;
    if n == 0 {
        return Err("RELAXSIM_THREADS: expected a positive integer, got 0".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Run(args) => commands::run(&args),
        Command::Reference { run, refine } => commands::reference(&run, refine),
        Command::Compare(args) => commands::compare(&args),
        Command::Preset(args) => commands::preset(&args),
        Command::Validate { run, samples } => commands::validate(&run, samples),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
