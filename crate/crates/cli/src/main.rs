mod commands;
mod reference;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lqgcn_core::{ConvVariant, InputVariant, OuterAdjacency, ThresholdMode};

/// Overlapping community detection with a local-modularity graph convolutional network.
#[derive(Debug, Parser)]
#[command(name = "lqgcn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train on an edge list and write affiliations, cover, log, manifest and checkpoint.
    Train(TrainArgs),
    /// Compare a predicted cover with a ground-truth cover.
    Eval(EvalArgs),
    /// Generate a planted overlapping-community instance.
    Synth(SynthArgs),
    /// Score an affiliation matrix over a list of thresholds.
    Sweep(SweepArgs),
    /// Run many seeds on one dataset and report mean scores next to reference values.
    Repro(ReproArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariantArg {
    Main,
    Ablation,
}

impl From<VariantArg> for ConvVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Main => ConvVariant::Main,
            VariantArg::Ablation => ConvVariant::Ablation,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InputArg {
    /// node attributes
    X,
    /// adjacency rows (dense N x N; small graphs only)
    G,
    /// adjacency rows followed by attributes (dense; small graphs only)
    U,
}

impl From<InputArg> for InputVariant {
    fn from(v: InputArg) -> Self {
        match v {
            InputArg::X => InputVariant::X,
            InputArg::G => InputVariant::G,
            InputArg::U => InputVariant::U,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OuterArg {
    Renormalized,
    Augmented,
    Raw,
}

impl From<OuterArg> for OuterAdjacency {
    fn from(v: OuterArg) -> Self {
        match v {
            OuterArg::Renormalized => OuterAdjacency::Renormalized,
            OuterArg::Augmented => OuterAdjacency::Augmented,
            OuterArg::Raw => OuterAdjacency::Raw,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    ColumnMax,
    Raw,
}

impl From<ModeArg> for ThresholdMode {
    fn from(v: ModeArg) -> Self {
        match v {
            ModeArg::ColumnMax => ThresholdMode::ColumnMax,
            ModeArg::Raw => ThresholdMode::Raw,
        }
    }
}

/// Model and optimizer settings shared by `train` and `repro`.
#[derive(Debug, Args)]
struct ModelArgs {
    /// Number of communities.
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "main")]
    variant: VariantArg,
    #[arg(long, value_enum, default_value = "x")]
    input: InputArg,
    /// Outer propagation matrix of the main variant.
    #[arg(long, value_enum, default_value = "renormalized")]
    outer: OuterArg,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1e-3)]
    lr: f64,
    /// L2 weight-decay strength.
    #[arg(long, default_value_t = 1e-2)]
    weight_decay: f64,
    #[arg(long, default_value_t = 128)]
    hidden: usize,
    #[arg(long, default_value_t = 0.5)]
    dropout: f64,
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    #[arg(long, value_enum, default_value = "column-max")]
    threshold_mode: ModeArg,
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    /// Include the local-modularity loss once the loss plateaus.
    #[arg(long, value_enum, default_value = "on")]
    lq: Switch,
    /// Sample this many edges and non-edges per step instead of the exact loss.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    edges: PathBuf,
    /// Required for --input x and --input u.
    #[arg(long)]
    attrs: Option<PathBuf>,
    /// Ground-truth cover; when given, ONMI and Recall are printed.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    /// Node count; defaults to one past the largest id in either file.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// Fraction of nodes assigned to a second community.
    #[arg(long, default_value_t = 0.1)]
    overlap: f64,
    /// Affiliation strength of every membership.
    #[arg(long, default_value_t = 1.5)]
    strength: f64,
    /// Background edge probability.
    #[arg(long, default_value_t = 0.01)]
    eta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write attributes in the sparse coordinate layout instead of CSV.
    #[arg(long)]
    sparse_attrs: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    affiliations: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    /// Comma-separated thresholds.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
    thresholds: Vec<f64>,
    #[arg(long, value_enum, default_value = "column-max")]
    threshold_mode: ModeArg,
}

#[derive(Debug, Args)]
struct ReproArgs {
    /// Dataset name, e.g. facebook-348 or chemistry.
    #[arg(long)]
    dataset: String,
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    attrs: Option<PathBuf>,
    #[arg(long)]
    truth: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 50)]
    seeds: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { commands::EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Train(a) => commands::train(a),
        Command::Eval(a) => commands::eval(a),
        Command::Synth(a) => commands::synth(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Repro(a) => commands::repro(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
