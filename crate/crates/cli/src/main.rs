//! `qdac`: runs the converter pipeline, readouts, discord and SAT demos
//! from the command line and writes CSV or JSON.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use qdac_core::QdacError;

#[derive(Parser, Debug)]
#[command(
    name = "qdac",
    version,
    about = "Density-matrix simulator of an ensemble quantum DAC"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the converter on a truth table and emit the deviation form as JSON.
    RunDac(RunDacArgs),
    /// Read one, all, or a set of pointers back from the converter output.
    Fetch(FetchArgs),
    /// Discord of the clock-function state.
    Discord(DiscordArgs),
    /// Decide a DIMACS CNF through the analog readout.
    Sat(SatArgs),
    /// Measured SNR against the number of acquisitions.
    NoiseSweep(NoiseSweepArgs),
}

#[derive(Args, Debug)]
struct PipelineArgs {
    /// Truth-table file: `m n` header, then 2^m binary words.
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Mixed)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = BackendArg::Auto)]
    backend: BackendArg,
}

#[derive(Args, Debug)]
struct RunDacArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false, id = "selection")]
struct Selection {
    /// Single pointer.
    #[arg(long)]
    k: Option<usize>,
    /// Every pointer, one row each.
    #[arg(long)]
    all: bool,
    /// Comma-separated pointer set read as one projection.
    #[arg(long, value_delimiter = ',')]
    mix: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
struct FetchArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[command(flatten)]
    selection: Selection,
    #[arg(long, value_enum, default_value_t = RouteArg::Both)]
    route: RouteArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DiscordArgs {
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Measured side: the ancillas (`a`) or the data registers (`lr`).
    #[arg(long, value_enum, default_value_t = SideArg::A)]
    side: SideArg,
    /// Emit closed-form and numeric conditional entropy over θ as CSV.
    #[arg(long)]
    sweep_theta: bool,
    /// Number of θ samples in the sweep.
    #[arg(long, default_value_t = 10_000)]
    points: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SatArgs {
    /// DIMACS CNF file.
    input: PathBuf,
    /// Noise bound per output.
    #[arg(long, default_value_t = 0.1)]
    epsilon_th: f64,
    /// Smallest nonzero output amplitude.
    #[arg(long, default_value_t = 0.1)]
    v_lsb: f64,
    /// Gap constant.
    #[arg(long, default_value_t = 0.05)]
    c: f64,
    /// Standard deviation of the per-output noise before truncation.
    #[arg(long, default_value_t = 0.05)]
    sigma: f64,
    #[arg(long, default_value_t = 16)]
    acquisitions: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Pointer samples from the biased state; 0 skips sampling.
    #[arg(long, default_value_t = 1000)]
    shots: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct NoiseSweepArgs {
    /// Pointer bits; the default amplitude is 2^-m.
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long)]
    amplitude: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    sigma: f64,
    #[arg(long, default_value_t = 4)]
    l_min: usize,
    #[arg(long, default_value_t = 4096)]
    l_max: usize,
    /// Multiplier between consecutive acquisition counts.
    #[arg(long, default_value_t = 4)]
    factor: usize,
    #[arg(long, default_value_t = 100)]
    replicates: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Pure,
    Mixed,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Dense,
    Structured,
    Auto,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum RouteArg {
    #[value(name = "1")]
    Projective,
    #[value(name = "2")]
    Hadamard,
    Both,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SideArg {
    A,
    Lr,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug)]
enum CliError {
    Core(QdacError),
    Io(PathBuf, std::io::Error),
    Usage(String),
}

impl From<QdacError> for CliError {
    fn from(e: QdacError) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(QdacError::Capacity { .. }) => 2,
            CliError::Core(
                QdacError::InvariantViolation(_)
                | QdacError::Form(_)
                | QdacError::BackendCapability(_)
                | QdacError::ScalarTrace,
            ) => 3,
            _ => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match cli.command {
        Command::RunDac(a) => commands::run_dac(&a),
        Command::Fetch(a) => commands::fetch(&a),
        Command::Discord(a) => commands::discord(&a),
        Command::Sat(a) => commands::sat(&a),
        Command::NoiseSweep(a) => commands::noise_sweep(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
