use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use mixgraph::{ExtractionModel, GammaPolicy, Method, Sigma};

use crate::formats::parse_sigma;

#[derive(Debug, Parser)]
#[command(name = "mixgraph", version, about = "Node classification on mixed similar/dissimilar graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample two-Gaussian data (G50C shape by default).
    #[command(name = "gen-g50c")]
    GenG50c(GenArgs),
    /// Build a Gaussian-weighted kNN graph from features; all edges are S.
    BuildKnn(KnnArgs),
    /// Move opposite-label unlabeled edges into a dissimilar graph.
    SplitMixed(SplitArgs),
    /// Print the node assortativity coefficient of each edge kind.
    Nac(NacArgs),
    /// Propagate labels and write posteriors.
    Run(RunArgs),
    /// Run a realization sweep described by a JSON spec.
    Evaluate(EvaluateArgs),
    /// Re-run the command recorded in a manifest and check the outputs match.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::GenG50c(_) => "gen-g50c",
            Command::BuildKnn(_) => "build-knn",
            Command::SplitMixed(_) => "split-mixed",
            Command::Nac(_) => "nac",
            Command::Run(_) => "run",
            Command::Evaluate(_) => "evaluate",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 550)]
    pub n: usize,
    #[arg(long, default_value_t = 50)]
    pub d: usize,
    #[arg(long, default_value_t = 0.05)]
    pub bayes_error: f64,
    /// Probability of class +1.
    #[arg(long, default_value_t = 0.5)]
    pub balance: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Features CSV, then labels TSV.
    #[arg(short = 'o', long = "output", required = true, num_args = 1)]
    pub output: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KnnArgs {
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub k: usize,
    /// Kernel width, or `auto` for the mean k-th neighbor distance.
    #[arg(long, default_value = "auto", value_parser = parse_sigma)]
    pub sigma: Sigma<f64>,
    #[arg(short = 'o', long = "output")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub edges: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub labeled: PathBuf,
    /// Percentage of candidate dissimilar edges.
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value = "extract")]
    pub model: ExtractionModel,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short = 'o', long = "output")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct NacArgs {
    #[arg(long)]
    pub edges: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    /// Use only edges between nodes in `--labeled`.
    #[arg(long, requires = "labeled")]
    pub restrict_labeled: bool,
    #[arg(long)]
    pub labeled: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub method: Method,
    #[arg(long)]
    pub mixed: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub labeled: PathBuf,
    /// A value in [0, 1], `nac` or `cv`.
    #[arg(long)]
    pub gamma: GammaPolicy,
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.95)]
    pub nu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta0: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub prob_floor: f64,
    #[arg(long, default_value_t = 5)]
    pub cv_folds: usize,
    /// Comma-separated γ grid for cross-validation (default 0, 0.1, ..., 1).
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    /// Seed for cross-validation folds.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short = 'o', long = "output")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(short = 'o', long = "output")]
    pub output: PathBuf,
    /// Worker threads (default: available cores, capped by MIXEDGRAPH_THREADS).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}
