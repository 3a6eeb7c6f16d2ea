//! Command-line grammar. Every value can also come from `--config`; flags
//! given here override file values.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "gazegen",
    version,
    about = "Eye-gaze velocity modeling: spectrally regularized GANs, Markov baselines, fidelity metrics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Derive velocity from a gaze recording, normalize, and segment into
    /// fixed-length training sequences.
    Ingest(IngestArgs),
    /// Train a generator/discriminator pairing on a sequence dataset.
    Train(TrainArgs),
    /// Sample sequences from a trained model, in original velocity units.
    Generate(GenerateArgs),
    /// Compare a real and a synthetic dataset: moments, divergence,
    /// spectra, autocorrelation.
    Evaluate(EvaluateArgs),
    /// Train all four architecture pairings and rank them.
    Sweep(SweepArgs),
    /// Fit a hidden Markov model, optionally selecting the state count.
    Hmm(HmmArgs),
    /// Fit a KDE Markov model and sample a synthetic series.
    Kde(KdeArgs),
}

#[derive(clap::Args, Debug, Default)]
pub struct IngestArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Gaze recording CSV (t_ms,left_x,left_y,right_x,right_y).
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Eye selection: left, right, or both (pooled).
    #[arg(long)]
    pub eye: Option<String>,
    /// Segment length in samples.
    #[arg(long)]
    pub length: Option<usize>,
    /// Segment stride; defaults to the length (disjoint windows).
    #[arg(long)]
    pub stride: Option<usize>,
}

#[derive(clap::Args, Debug, Default)]
pub struct TrainArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Sequence dataset CSV (one sequence per row, values in [0, 1]).
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Ingest metadata JSON carrying the normalizer of the dataset.
    #[arg(long)]
    pub meta: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Generator architecture: lstm or cnn.
    #[arg(long)]
    pub generator: Option<String>,
    /// Discriminator architecture: lstm or cnn.
    #[arg(long)]
    pub discriminator: Option<String>,
    #[arg(long)]
    pub sequence_length: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub learning_rate: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta2: Option<f64>,
    #[arg(long)]
    pub noise_dim: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Spectral loss weight in the combined generator objective.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub eps_spec: Option<f64>,
    /// Generated sequences per epoch for the divergence evaluation.
    #[arg(long)]
    pub eval_count: Option<usize>,
    /// First epoch included in sweep integrals.
    #[arg(long)]
    pub window_start: Option<usize>,
    /// "real" records wall-clock seconds per epoch; "none" writes zeros so
    /// reruns are byte-identical.
    #[arg(long)]
    pub timing: Option<String>,
}

#[derive(clap::Args, Debug, Default)]
pub struct GenerateArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Trained model JSON.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(clap::Args, Debug, Default)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Real sequence dataset CSV.
    #[arg(long)]
    pub real: Option<PathBuf>,
    /// Synthetic sequence dataset CSV.
    #[arg(long)]
    pub synthetic: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long)]
    pub max_lag: Option<usize>,
    /// Also write SVG plots of the value histograms and ACF curves.
    #[arg(long)]
    pub plots: bool,
}

#[derive(clap::Args, Debug, Default)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub meta: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub sequence_length: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub learning_rate: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta2: Option<f64>,
    #[arg(long)]
    pub noise_dim: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub eps_spec: Option<f64>,
    #[arg(long)]
    pub eval_count: Option<usize>,
    #[arg(long)]
    pub window_start: Option<usize>,
    #[arg(long)]
    pub timing: Option<String>,
    /// Winner criterion: normalized-product, spectral-integral,
    /// djs-integral, or mean-epoch-seconds.
    #[arg(long)]
    pub ranking: Option<String>,
}

#[derive(clap::Args, Debug, Default)]
pub struct HmmArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Velocity series CSV (t_ms,v).
    #[arg(long)]
    pub series: Option<PathBuf>,
    /// Sequence dataset CSV; rows are concatenated into one series.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fixed number of hidden states.
    #[arg(long)]
    pub states: Option<usize>,
    /// Inclusive state-count range to select over, e.g. 2..5.
    #[arg(long)]
    pub state_range: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Histogram bins for the selection divergence.
    #[arg(long)]
    pub bins: Option<usize>,
}

#[derive(clap::Args, Debug, Default)]
pub struct KdeArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Velocity series CSV (t_ms,v).
    #[arg(long)]
    pub series: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Markov order k.
    #[arg(long)]
    pub order: Option<usize>,
    /// Number of values to sample.
    #[arg(long)]
    pub length: Option<usize>,
}
