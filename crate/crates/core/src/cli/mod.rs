//! `dcp` command line: `simulate` runs the Monte Carlo study, `predict` builds a
//! prediction set from a training CSV.
//!
//! Exit codes are 0 on success, 1 on runtime failure and 2 on usage errors.

mod predict;
mod simulate;
pub mod svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use predict::format_json;
pub use simulate::{load_config_file, results_csv, trials_csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
pub(crate) enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "dcp", version, about = "Discretized conformal prediction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the coverage/length simulation and write CSV summaries.
    Simulate(SimulateArgs),
    /// Compute a prediction set for new covariates from a training CSV.
    Predict(PredictArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum DiscretizerArg {
    Nearest,
    Randomized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Args)]
pub(crate) struct SimulateArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Grid sizes, comma separated.
    #[arg(long = "M", value_name = "LIST")]
    pub grid_sizes: Option<String>,
    /// Methods, comma separated: oracle,parametric,approximate,cpdd,cpdm,split.
    #[arg(long)]
    pub methods: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads, 0 = all cores.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_enum)]
    pub discretizer: Option<DiscretizerArg>,
    #[arg(long = "warm-start", value_enum)]
    pub warm_start: Option<Switch>,
    /// Lasso convergence tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    /// Optional `key = value` file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Also write coverage.svg and length.svg.
    #[arg(long)]
    pub plot: bool,
    /// Also write trials.csv.
    #[arg(long = "per-trial")]
    pub per_trial: bool,
    /// Record wall-clock time per trial (makes the CSV non-reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub(crate) struct PredictArgs {
    /// Training CSV with header x1..xp,y.
    #[arg(long)]
    pub train: PathBuf,
    /// Test covariates: a comma-separated vector or a CSV file (one row per point).
    #[arg(long)]
    pub x: String,
    #[arg(long, default_value = "cpdm")]
    pub method: String,
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    #[arg(long = "M", default_value_t = 20)]
    pub grid_size: usize,
    /// Seed for randomized rounding and the split method.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
    /// lasso, ridge, ls-on-support or mean.
    #[arg(long, default_value = "lasso")]
    pub fitter: String,
    /// Penalty; defaults to sigma * sqrt(ln p / 2n).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Noise scale used only for the default penalty.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long)]
    pub intercept: bool,
    #[arg(long, value_enum, default_value = "nearest")]
    pub discretizer: DiscretizerArg,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Simulate(args) => simulate::run(&args, out, err),
        Command::Predict(args) => predict::run(&args, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.exit_code()
        }
    }
}

/// Entry point used by the `dcp` binary.
pub fn main_entry() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
