use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const PRESET_HELP: &str = "\
Presets:
  trig      0.3 sin(2π·50t) + 0.6 cos(2π·100t) + 0.1 sin(2π·200t) + 0.9 cos(2π·400t)
            N=256 at fs=800 Hz from t=0, M=64, Poisson matrix, OMP (16 atoms)
  gauspuls  50 kHz Gaussian pulse, 60% bandwidth at -6 dB, cut at -60 dB
            N=928 at fs=10 MHz over [-t_cut, t_cut], M=93, Poisson matrix, OMP (24 atoms)
  square    unit square wave, 50% duty, period 120 samples
            N=240 at fs=1024 Hz from t=0, M=80, Poisson matrix, TV

Every preset runs 50 times with master seed 0 unless --runs/--seed say otherwise.

Without --out, output goes to $RANDSAMP_OUT_DIR/<command>.<format> when that
variable is set, and to standard output otherwise.";

#[derive(Debug, Parser)]
#[command(
    name = "randsamp",
    version,
    about = "Recover uniformly gridded signals from random samples",
    args_override_self = true,
    after_help = PRESET_HELP
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a preset signal on its uniform grid
    #[command(args_override_self = true, after_help = PRESET_HELP)]
    Generate(GenerateArgs),
    /// Draw sorted random sample instants and sample the signal there
    #[command(args_override_self = true, after_help = PRESET_HELP)]
    Sample(SampleArgs),
    /// Build an observation matrix for a set of random instants
    #[command(args_override_self = true, after_help = PRESET_HELP)]
    BuildMatrix(BuildMatrixArgs),
    /// Recover the uniform grid from one set of random samples
    #[command(args_override_self = true, after_help = PRESET_HELP)]
    Recover(RecoverArgs),
    /// Run a seeded batch of recoveries and report per-run errors
    #[command(args_override_self = true, after_help = PRESET_HELP)]
    Experiment(ExperimentArgs),
    /// Compare truncated matrices over a list of P against the Poisson form
    #[command(name = "sweep-p", args_override_self = true, after_help = PRESET_HELP)]
    SweepP(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    Trig,
    Gauspuls,
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixArg {
    Naive,
    Truncated,
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    Omp,
    Tv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SignalArgs {
    /// Signal and sampling configuration
    #[arg(long, value_enum)]
    pub preset: PresetArg,
    /// Number of random samples M
    #[arg(long)]
    pub m: Option<usize>,
    /// Number of grid points N
    #[arg(long)]
    pub n: Option<usize>,
    /// Grid sampling rate in Hz
    #[arg(long)]
    pub fs: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// key=value file of flags; flags given on the command line win
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct MatrixArgs {
    /// Observation matrix construction [default: poisson]
    #[arg(long, value_enum)]
    pub matrix: Option<MatrixArg>,
    /// Number of periodization terms P (even) for the truncated matrix
    #[arg(long, required_if_eq("matrix", "truncated"))]
    pub p_terms: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Recovery algorithm [default: tv for square, omp otherwise]
    #[arg(long, value_enum)]
    pub solver: Option<SolverArg>,
    /// OMP atom budget
    #[arg(long)]
    pub max_atoms: Option<usize>,
    /// TV weight relative to the measurement norm [default: 3e-3]
    #[arg(long)]
    pub tv_lambda: Option<f64>,
    /// TV smoothing [default: 0.3]
    #[arg(long)]
    pub tv_epsilon: Option<f64>,
    /// TV step in units of 1/‖M0‖² [default: 1]
    #[arg(long)]
    pub tv_step: Option<f64>,
    /// TV iteration cap [default: 10000]
    #[arg(long)]
    pub tv_max_iters: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct BatchArgs {
    /// Number of seeded runs
    #[arg(long)]
    pub runs: Option<usize>,
    /// Master seed; run r uses a seed derived from it and r
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads [default: all cores]; results do not depend on it
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,
    /// Fill the wall-clock timing columns (makes output vary between runs)
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub signal: SignalArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub signal: SignalArgs,
    /// Seed for the random instants
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BuildMatrixArgs {
    #[command(flatten)]
    pub signal: SignalArgs,
    #[command(flatten)]
    pub matrix: MatrixArgs,
    /// CSV of samples written by `sample`; drawn from --seed when absent
    #[arg(long)]
    pub samples: Option<PathBuf>,
    /// Seed for the random instants
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RecoverArgs {
    #[command(flatten)]
    pub signal: SignalArgs,
    #[command(flatten)]
    pub matrix: MatrixArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// CSV of samples written by `sample`; drawn from --seed when absent
    #[arg(long)]
    pub samples: Option<PathBuf>,
    /// Seed for the random instants
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub signal: SignalArgs,
    #[command(flatten)]
    pub matrix: MatrixArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub batch: BatchArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub signal: SignalArgs,
    /// Comma-separated even term counts
    #[arg(long, value_delimiter = ',', default_value = "2,20,200,2000,20000")]
    pub p_list: Vec<usize>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub batch: BatchArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}
