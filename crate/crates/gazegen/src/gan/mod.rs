//! Adversarial training of sequence generators with spectral regularization.

pub mod builders;
pub mod losses;
pub mod sweep;
pub mod train;

use serde::{Deserialize, Serialize};

use crate::data::Normalizer;
use crate::error::{Error, Result};
use crate::neural::params::{ParamSet, StateMap};

pub use builders::{Discriminator, Generator};
pub use losses::{combined_loss, discriminator_loss, generator_loss, PROB_FLOOR};
pub use sweep::{architecture_sweep, PairingOutcome, SweepRanking, SweepReport};
pub use train::{generate, train, train_with, EpochRecord, TrainOutput, TrainingHistory};

/// Hidden width of the LSTM generator.
pub const LSTM_GEN_HIDDEN: usize = 16;
/// Hidden width of the LSTM discriminator.
pub const LSTM_DISC_HIDDEN: usize = 64;
/// Negative-side slope for discriminator activations.
pub const LEAKY_SLOPE: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArchKind {
    Lstm,
    Cnn,
}

impl ArchKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lstm" => Ok(ArchKind::Lstm),
            "cnn" => Ok(ArchKind::Cnn),
            other => Err(Error::Config(format!(
                "unknown architecture '{other}' (expected lstm or cnn)"
            ))),
        }
    }
}

impl std::fmt::Display for ArchKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ArchKind::Lstm => write!(f, "lstm"),
            ArchKind::Cnn => write!(f, "cnn"),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GanConfig {
    pub generator: ArchKind,
    pub discriminator: ArchKind,
    pub sequence_length: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub noise_dim: usize,
    pub epochs: usize,
    /// Weight of the spectral term in the combined generator loss.
    pub spectral_weight: f64,
    pub spectral_eps: f64,
    pub seed: u64,
    /// Generated sequences per epoch for the divergence evaluation.
    pub eval_count: usize,
    /// First epoch (1-based) included in the sweep integrals.
    pub window_start: usize,
}

impl Default for GanConfig {
    fn default() -> Self {
        GanConfig {
            generator: ArchKind::Lstm,
            discriminator: ArchKind::Cnn,
            sequence_length: 200,
            batch_size: 128,
            learning_rate: 0.0002,
            beta1: 0.5,
            beta2: 0.999,
            noise_dim: 256,
            epochs: 500,
            spectral_weight: 0.1,
            spectral_eps: 1e-8,
            seed: 0,
            eval_count: 128,
            window_start: 100,
        }
    }
}

impl GanConfig {
    pub fn validate(&self) -> Result<()> {
        if self.spectral_weight < 0.0 {
            return Err(Error::Config(format!(
                "spectral weight must be >= 0, got {}",
                self.spectral_weight
            )));
        }
        if self.epochs < 1 {
            return Err(Error::Config("epochs must be >= 1".into()));
        }
        if self.batch_size < 2 {
            return Err(Error::Config(format!(
                "batch size must be >= 2, got {}",
                self.batch_size
            )));
        }
        if self.sequence_length < 2 {
            return Err(Error::Config(format!(
                "sequence length must be >= 2, got {}",
                self.sequence_length
            )));
        }
        if self.noise_dim < 1 {
            return Err(Error::Config("noise dimension must be >= 1".into()));
        }
        if self.eval_count < 1 {
            return Err(Error::Config("evaluation sample count must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0) || !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::Config("invalid optimizer hyperparameters".into()));
        }
        if self.spectral_eps <= 0.0 {
            return Err(Error::Config("spectral eps must be > 0".into()));
        }
        Ok(())
    }
}

/// Everything needed to regenerate sequences: both parameter sets, the
/// batch-norm running statistics, the architecture coordinates, and the
/// normalizer fitted to the training data.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GanModel {
    pub generator_kind: ArchKind,
    pub discriminator_kind: ArchKind,
    pub sequence_length: usize,
    pub noise_dim: usize,
    pub gen_params: ParamSet,
    pub disc_params: ParamSet,
    pub gen_state: StateMap,
    pub disc_state: StateMap,
    pub normalizer: Normalizer,
    pub seed: u64,
}
