//! `qmetro`: batch front end for building probe states, computing quantum
//! Fisher information, evaluating entanglement witnesses and running
//! metrology scenarios and sweeps.

mod commands;
mod error;
mod output;
mod range;
mod spec;
mod statefile;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{CliError, CliResult};
use crate::range::Range;
use crate::spec::{GeneratorSpec, NoiseSpec};

#[derive(Debug, Parser)]
#[command(name = "qmetro", version, about = "Quantum metrology numerics for qubit ensembles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a probe state and write it as JSON.
    State(StateArgs),
    /// Quantum Fisher information of a stored state.
    Qfi(QfiArgs),
    /// Evaluate entanglement criteria on a stored state.
    Witness(WitnessArgs),
    /// Error propagation and the Cramér-Rao bound for a metrology scheme.
    Scenario(ScenarioArgs),
    /// Spin-squeezed Ramsey sweep over particle number and Λ, written as CSV.
    Sweep(SweepArgs),
    /// Run the randomized property battery for the Fisher information.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RepArg {
    Full,
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    Polarized,
    Coherent,
    Ghz,
    Dicke,
    Singlet,
    Squeezed,
    Mixed,
    Random,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    #[arg(value_enum)]
    pub kind: StateKind,
    /// Number of qubits.
    #[arg(short = 'n', long = "n")]
    pub n: usize,
    /// Number of flipped spins for Dicke states.
    #[arg(short = 'm', long)]
    pub m: Option<usize>,
    /// Λ of `J_x² − ΛJ_z` for squeezed states.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Orientation of polarized and GHZ states.
    #[arg(long, default_value = "z")]
    pub axis: String,
    /// Polar and azimuthal angle of coherent states.
    #[arg(long, default_value_t = 0.0)]
    pub polar: f64,
    #[arg(long, default_value_t = 0.0)]
    pub azimuth: f64,
    /// Rank of random density matrices; 0 gives a pure state.
    #[arg(long, default_value_t = 0)]
    pub rank: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Defaults to full for the singlet and symmetric otherwise.
    #[arg(long, value_enum)]
    pub rep: Option<RepArg>,
    /// `none`, `depolarizing:P` or `pauli:GAMMA:AX,AY,AZ:T`, applied to every qubit.
    #[arg(long, default_value = "none")]
    pub noise: NoiseSpec,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QfiArgs {
    /// State file written by `qmetro state`.
    pub state: PathBuf,
    /// `x`, `y`, `z`, `dir:a,b,c` or `gradient`.
    #[arg(short, long, default_value = "z")]
    pub generator: GeneratorSpec,
    /// Include the symmetric logarithmic derivative.
    #[arg(long)]
    pub sld: bool,
    /// Include the Wigner-Yanase skew information.
    #[arg(long)]
    pub wy: bool,
    /// Include the quantum Zeno time.
    #[arg(long)]
    pub zeno: bool,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    pub state: PathBuf,
    /// Evaluate every criterion (the default).
    #[arg(long, conflicts_with = "criteria")]
    pub all: bool,
    /// Comma-separated criterion ids, e.g. `xi_s,xi_os,qfi_separable`.
    #[arg(long, value_delimiter = ',')]
    pub criteria: Vec<String>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioId {
    Ramsey,
    GhzParity,
    Dicke,
    Squeezed,
    Gradient,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(value_enum)]
    pub id: ScenarioId,
    #[arg(short = 'n', long = "n")]
    pub n: usize,
    #[arg(long, value_enum, default_value = "symmetric")]
    pub rep: RepArg,
    /// Working point θ₀.
    #[arg(long, default_value_t = 0.0)]
    pub theta0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Noise applied to the probe; forces the full representation.
    #[arg(long, default_value = "none")]
    pub noise: NoiseSpec,
    /// Ramsey readout on a stored probe instead of the built-in one.
    #[arg(long, conflicts_with_all = ["noise"])]
    pub probe: Option<PathBuf>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepScenario {
    /// Noiseless squeezing frontier.
    Frontier,
    /// Depolarized squeezed probes.
    Squeezed,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(value_enum)]
    pub scenario: SweepScenario,
    /// Particle numbers as `start:stop:count[:lin|log]` or a single value.
    #[arg(short = 'n', long = "n")]
    pub n: Range,
    /// `none` or `depolarizing:P`.
    #[arg(long, default_value = "none")]
    pub noise: NoiseSpec,
    /// Λ grid.
    #[arg(long, default_value = "1e-3:1e3:64:log")]
    pub lambda: Range,
    /// Report only the Λ maximizing the precision for each N.
    #[arg(long, conflicts_with = "lambda")]
    pub optimize: bool,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = qmetro::battery::BatteryConfig::default().seed)]
    pub seed: u64,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("QMETRO_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|t| *t > 0)
        .ok_or_else(|| CliError::usage(format!("QMETRO_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::usage(format!("cannot configure worker pool: {e}")))
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match cli.command {
        Command::State(a) => commands::state(&a),
        Command::Qfi(a) => commands::qfi(&a),
        Command::Witness(a) => commands::witness(&a),
        Command::Scenario(a) => commands::scenario(&a),
        Command::Sweep(a) => sweep::run(&a),
        Command::Selftest(a) => commands::selftest(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qmetro: {e}");
            e.exit_code()
        }
    }
}
