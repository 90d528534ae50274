//! Command-line surface. Parsing only; behavior lives in `commands`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::OrderingOpt;

#[derive(Parser)]
#[command(
    name = "mlouvain",
    version,
    about = "Variance-aware multiobjective Louvain for multiplex networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Detect communities in one multiplex edge-list file
    Run(RunArgs),
    /// Sweep SBM mixing ratios from a JSON experiment config
    BenchSbm(BenchArgs),
    /// Sweep LFR mixing parameters from a JSON experiment config
    BenchLfr(BenchArgs),
    /// Per-gamma mean table at fixed generator settings
    GammaSweep(BenchArgs),
    /// Benchmark on-disk datasets, optionally stacking a random noise layer
    Real(RealArgs),
    /// Score one partition file against another
    Metrics(MetricsArgs),
}

#[derive(Args)]
pub struct RunArgs {
    /// Edge list: `layer src dst [weight]` per line, `#` comments
    pub graph: PathBuf,
    /// Reference partition; adds accuracy/NMI to the output row
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// MA | MVM | MVP | EVM | EVP | GL
    #[arg(long)]
    pub preset: String,
    /// Solution-list capacity (required for MA/MVM/MVP)
    #[arg(long)]
    pub h: Option<usize>,
    /// Variance weight in (0,1) (required for MVM/MVP/EVM/EVP)
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, value_enum, default_value_t)]
    pub ordering: OrderingOpt,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where to write the partition (default: `<graph stem>.partition`)
    #[arg(long)]
    pub partition_out: Option<PathBuf>,
}

#[derive(Args)]
pub struct BenchArgs {
    /// JSON experiment config
    pub config: PathBuf,
    /// CSV destination (default: the config's `output`, else stdout)
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Worker threads (default: the config's `jobs`, else all cores)
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Fill `wall_ms` (makes the CSV nondeterministic)
    #[arg(long)]
    pub timings: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
pub enum SettingOpt {
    /// The dataset's own layers, one deterministic instance
    Informative,
    /// Dataset layers plus one Erdos-Renyi noise layer per `--noise-p`
    PlusNoise,
    /// Layers flattened to one, plus the noise layer
    FlattenPlusNoise,
}

#[derive(Args)]
pub struct RealArgs {
    /// Dataset directories (`truth.labels` + `multiplex.edges` and/or
    /// `features*.csv`)
    #[arg(required = true)]
    pub data: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = SettingOpt::Informative)]
    pub setting: SettingOpt,
    /// Noise-layer edge probabilities for the plus-noise settings
    #[arg(long, value_delimiter = ',', default_values_t = [0.01, 0.03, 0.05])]
    pub noise_p: Vec<f64>,
    /// Neighbors per node when building layers from feature files
    #[arg(long, default_value_t = crate::dataset::DEFAULT_KNN)]
    pub knn: usize,
    /// Optional experiment config supplying methods/seed/samples/runs;
    /// generator sections are ignored here
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Noise draws per noise-p point (forced to 1 when informative)
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub timings: bool,
}

#[derive(Args)]
pub struct MetricsArgs {
    /// Candidate partition file, one integer label per line
    pub pred: PathBuf,
    /// Reference partition file
    pub truth: PathBuf,
    /// Arithmetic-mean NMI normalization instead of geometric
    #[arg(long)]
    pub arithmetic: bool,
}
