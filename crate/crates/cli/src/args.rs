use std::path::PathBuf;

use actmap::cluster::EpsilonMode;
use actmap::lens::LensKind;
use actmap::metric::Metric;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "actmap", version, about = "Mapper graphs for labeled point clouds")]
pub struct Cli {
    /// Worker threads; output does not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a seeded synthetic cloud and its labels.
    Generate(GenerateArgs),
    /// Build a mapper graph from a matrix, or every layer of a manifest.
    Build(BuildArgs),
    /// Report components, branching nodes, loops and optional projections.
    Analyze(AnalyzeArgs),
    /// Histogram of lens values, per layer when given a manifest.
    Stats(StatsArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
#[value(rename_all = "snake_case")]
pub enum Kind {
    NoisyCircle,
    YBranch,
    Blobs,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long, default_value_t = 400)]
    pub points: usize,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 0.05)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of blobs.
    #[arg(long, default_value_t = 3)]
    pub centers: usize,
    /// Matrix output; a `.csv` extension selects CSV, anything else binary.
    #[arg(long)]
    pub out: PathBuf,
    /// Label output; defaults to `<out stem>.meta.json`.
    #[arg(long)]
    pub metadata: Option<PathBuf>,
}

/// Mapper parameters of `build`.
#[derive(Args, Debug, Clone)]
pub struct MapperArgs {
    #[arg(long, default_value = "l2_norm")]
    pub lens: LensKind,
    #[arg(long, default_value_t = 70)]
    pub intervals: usize,
    /// Fraction in [0, 1) or integer percent.
    #[arg(long, default_value = "0.3")]
    pub overlap: String,
    #[arg(long, default_value_t = 5)]
    pub min_pts: usize,
    /// A positive radius or `adaptive`.
    #[arg(long, default_value = "adaptive")]
    pub epsilon: EpsilonMode,
    #[arg(long, default_value = "euclidean")]
    pub metric: Metric,
    #[arg(long, default_value_t = 0.0)]
    pub min_jaccard: f64,
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[arg(long, required_unless_present = "manifest", conflicts_with = "manifest")]
    pub input: Option<PathBuf>,
    #[arg(long, conflicts_with = "manifest")]
    pub metadata: Option<PathBuf>,
    /// Build every layer and write each graph to its manifest location.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[command(flatten)]
    pub mapper: MapperArgs,
    /// Output file or directory; the default file name encodes the parameters,
    /// e.g. `overlap-30-epsilon-adaptive.json`.
    #[arg(long, conflicts_with = "manifest")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Matrix the graph was built from; needed for projections.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub metadata: Option<PathBuf>,
    #[arg(long, default_value_t = actmap::analysis::DEFAULT_MIN_DEGREE)]
    pub min_degree: usize,
    /// Node ids to project, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub select: Vec<usize>,
    /// Named node groups to project together, `name=1,2;other=3,4`.
    #[arg(long)]
    pub groups: Option<String>,
    /// Report file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[arg(long, required_unless_present = "manifest", conflicts_with = "manifest")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long, default_value = "l2_norm")]
    pub lens: LensKind,
    #[arg(long, default_value_t = 20)]
    pub bins: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
