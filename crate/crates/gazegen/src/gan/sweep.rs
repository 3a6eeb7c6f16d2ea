//! Architecture-selection sweep: train every generator/discriminator
//! pairing on the same data and compare windowed loss integrals and
//! per-epoch cost.

use serde::{Deserialize, Serialize};

use crate::data::Normalizer;
use crate::error::{Error, Result};
use crate::gan::train::{train_with, EpochRecord, TrainingHistory};
use crate::gan::{ArchKind, GanConfig};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepRanking {
    /// Product of the three metrics, each normalized by its maximum across
    /// pairings; the smallest "volume" wins.
    #[default]
    NormalizedProduct,
    SpectralIntegral,
    DjsIntegral,
    MeanEpochSeconds,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairingOutcome {
    pub name: String,
    pub generator: ArchKind,
    pub discriminator: ArchKind,
    pub seed: u64,
    /// Trapezoidal integral of the spectral loss over the window.
    pub spectral_integral: f64,
    /// Trapezoidal integral of the divergence over the window.
    pub d_js_integral: f64,
    pub mean_epoch_seconds: f64,
    pub history: TrainingHistory,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepFailure {
    pub name: String,
    pub error: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepReport {
    pub entries: Vec<PairingOutcome>,
    pub failures: Vec<SweepFailure>,
    pub winner: Option<String>,
    /// True when at least one pairing failed to train.
    pub partial: bool,
    pub window_start: usize,
    pub epochs: usize,
    pub ranking: SweepRanking,
}

/// Trapezoidal rule over unit-spaced samples.
pub fn trapezoid(values: &[f64]) -> f64 {
    values.windows(2).map(|w| 0.5 * (w[0] + w[1])).sum()
}

pub const PAIRINGS: [(ArchKind, ArchKind); 4] = [
    (ArchKind::Cnn, ArchKind::Cnn),
    (ArchKind::Cnn, ArchKind::Lstm),
    (ArchKind::Lstm, ArchKind::Cnn),
    (ArchKind::Lstm, ArchKind::Lstm),
];

fn windowed(history: &[EpochRecord], start: usize) -> (Vec<f64>, Vec<f64>) {
    let spectral: Vec<f64> = history
        .iter()
        .filter(|r| r.epoch >= start)
        .map(|r| r.l_spectral)
        .collect();
    let d_js: Vec<f64> = history
        .iter()
        .filter(|r| r.epoch >= start)
        .map(|r| r.d_js)
        .collect();
    (spectral, d_js)
}

fn rank(entries: &[PairingOutcome], ranking: SweepRanking) -> Option<String> {
    if entries.is_empty() {
        return None;
    }
    let score = |e: &PairingOutcome| -> f64 {
        match ranking {
            SweepRanking::SpectralIntegral => e.spectral_integral,
            SweepRanking::DjsIntegral => e.d_js_integral,
            SweepRanking::MeanEpochSeconds => e.mean_epoch_seconds,
            SweepRanking::NormalizedProduct => {
                let max_s = entries
                    .iter()
                    .map(|x| x.spectral_integral)
                    .fold(0.0, f64::max);
                let max_d = entries.iter().map(|x| x.d_js_integral).fold(0.0, f64::max);
                let max_t = entries
                    .iter()
                    .map(|x| x.mean_epoch_seconds)
                    .fold(0.0, f64::max);
                let norm = |v: f64, m: f64| if m > 0.0 { v / m } else { 0.0 };
                norm(e.spectral_integral, max_s)
                    * norm(e.d_js_integral, max_d)
                    * norm(e.mean_epoch_seconds, max_t)
            }
        }
    };
    entries
        .iter()
        .min_by(|a, b| score(a).partial_cmp(&score(b)).expect("finite scores"))
        .map(|e| e.name.clone())
}

/// Train all four pairings with per-pairing derived seeds on shared data.
/// A pairing that fails to train is recorded and skipped; the report is
/// then marked partial.
pub fn architecture_sweep(
    dataset: &[Vec<f64>],
    normalizer: Normalizer,
    base: &GanConfig,
    ranking: SweepRanking,
    measure_time: bool,
) -> Result<SweepReport> {
    if base.window_start >= base.epochs && base.epochs > 1 {
        return Err(Error::Config(format!(
            "integral window start {} must lie before the last epoch {}",
            base.window_start, base.epochs
        )));
    }
    let mut entries = Vec::new();
    let mut failures = Vec::new();
    for (idx, (gen, disc)) in PAIRINGS.iter().enumerate() {
        let name = format!("{gen}-{disc}");
        let config = GanConfig {
            generator: *gen,
            discriminator: *disc,
            seed: base.seed.wrapping_add(idx as u64),
            ..base.clone()
        };
        match train_with(dataset, normalizer, &config, measure_time, |_| Ok(())) {
            Ok(out) => {
                let (spectral, d_js) = windowed(&out.history, base.window_start);
                let mean_seconds = out.history.iter().map(|r| r.seconds).sum::<f64>()
                    / out.history.len() as f64;
                entries.push(PairingOutcome {
                    name,
                    generator: *gen,
                    discriminator: *disc,
                    seed: config.seed,
                    spectral_integral: trapezoid(&spectral),
                    d_js_integral: trapezoid(&d_js),
                    mean_epoch_seconds: mean_seconds,
                    history: out.history,
                });
            }
            Err(e) => failures.push(SweepFailure {
                name,
                error: e.to_string(),
            }),
        }
    }
    let winner = rank(&entries, ranking);
    Ok(SweepReport {
        partial: !failures.is_empty(),
        entries,
        failures,
        winner,
        window_start: base.window_start,
        epochs: base.epochs,
        ranking,
    })
}
