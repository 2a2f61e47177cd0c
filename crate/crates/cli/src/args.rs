use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "zodfo",
    version,
    about = "Zeroth-order finite-sum solvers and benchmark traces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one solver and write its trace CSV.
    Run(RunArgs),
    /// Run every block of a key=value manifest and write traces plus an index.
    Grid(GridArgs),
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Manifest of blank-line separated `key = value` blocks.
    pub manifest: PathBuf,
    /// Directory receiving the traces and `index.csv`.
    #[arg(long, default_value = "traces")]
    pub out_dir: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Libsvm,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    Logistic,
    Ridge,
    Quadratic,
}

#[allow(clippy::enum_variant_names)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Solver {
    ZoVarag,
    ZoSvrg,
    ZoKatyusha,
    ZoNesterov,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Estimator {
    Gaussian,
    Coordinate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FStar {
    Precompute,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TimingMode {
    Wall,
    Off,
}

/// One experiment. Every flag also works as a manifest key without the
/// leading dashes.
#[derive(Clone, Debug, Args)]
pub struct RunArgs {
    /// Data file for logistic and ridge problems.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Data format; guessed from the extension when omitted (`.csv` is CSV).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Zero-based label column for CSV data.
    #[arg(long, default_value_t = 0)]
    pub label_column: usize,
    /// Pad LIBSVM rows to at least this many features.
    #[arg(long)]
    pub features: Option<usize>,
    /// Rescale rows so the largest has unit norm.
    #[arg(long)]
    pub scale_features: bool,

    #[arg(long, value_enum, default_value = "logistic")]
    pub problem: Problem,
    /// Regularizer weight on ‖x‖².
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,

    /// Quadratic dimension.
    #[arg(long, default_value_t = 10)]
    pub dim: usize,
    /// Quadratic component count.
    #[arg(long, default_value_t = 100)]
    pub components: usize,
    /// Quadratic strong convexity.
    #[arg(long, default_value_t = 1e-2)]
    pub tau: f64,
    /// Quadratic smoothness.
    #[arg(long, default_value_t = 1.0)]
    pub smoothness: f64,
    /// Seed of the quadratic spectra.
    #[arg(long, default_value_t = 0)]
    pub problem_seed: u64,

    #[arg(long, value_enum, default_value = "zo-varag")]
    pub solver: Solver,
    /// Inner-loop estimator; the pivot always uses coordinate differences.
    #[arg(long, value_enum, default_value = "gaussian")]
    pub estimator: Estimator,
    /// 1: θ-weighted average, 2: last aggregate.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub pivot: u8,
    #[arg(long, default_value_t = 50)]
    pub epochs: u32,
    #[arg(long, default_value_t = 1)]
    pub batch: usize,
    /// Gaussian smoothing radius.
    #[arg(long, default_value_t = 1e-3)]
    pub mu: f64,
    /// Coordinate difference width.
    #[arg(long, default_value_t = 1e-3)]
    pub nu: f64,
    /// Equivalent step size α·γ (the step itself for the baselines). The
    /// theoretical value when omitted.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Momentum p for zo-varag, p₀ for zo-katyusha.
    #[arg(long, default_value_t = 0.5)]
    pub p0: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Trace CSV path.
    #[arg(long, default_value = "trace.csv")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "precompute")]
    pub fstar: FStar,
    /// `off` writes 0 ms everywhere so repeated runs are byte-identical.
    #[arg(long, value_enum, default_value = "wall")]
    pub timing: TimingMode,
}

/// Parser for manifest entries: the same flags without a subcommand.
#[derive(Debug, Parser)]
#[command(
    name = "manifest",
    no_binary_name = true,
    disable_help_flag = true,
    disable_version_flag = true
)]
pub struct EntryArgs {
    #[command(flatten)]
    pub run: RunArgs,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Logistic => "logistic",
            Problem::Ridge => "ridge",
            Problem::Quadratic => "quadratic",
        }
    }
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::ZoVarag => "zo-varag",
            Solver::ZoSvrg => "zo-svrg",
            Solver::ZoKatyusha => "zo-katyusha",
            Solver::ZoNesterov => "zo-nesterov",
        }
    }
}
