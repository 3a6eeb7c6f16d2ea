//! Consolidated fidelity report comparing a real and a synthetic sample set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::acf::acf_mean_over_sequences;
use crate::metrics::histogram::{histogram, js_divergence};
use crate::metrics::moments::{moments, Moments};
use crate::spectral::spectral_score;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ReportSettings {
    pub bins: usize,
    pub hist_eps: f64,
    pub spectral_eps: f64,
    pub acf_max_lag: usize,
}

impl Default for ReportSettings {
    fn default() -> Self {
        ReportSettings {
            bins: super::histogram::DEFAULT_BINS,
            hist_eps: super::histogram::DEFAULT_HIST_EPS,
            spectral_eps: 1e-8,
            acf_max_lag: 50,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentPair {
    pub real: Moments,
    pub synthetic: Moments,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AcfCurves {
    pub lags: Vec<usize>,
    pub real: Vec<f64>,
    pub synthetic: Vec<f64>,
}

/// Everything recorded about one comparison, including the settings that
/// shaped the numbers (divergences are binning-dependent).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub moments: MomentPair,
    pub d_js: f64,
    pub spectral_score: f64,
    pub acf: AcfCurves,
    pub settings: ReportMeta,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportMeta {
    pub bins: usize,
    pub hist_eps: f64,
    pub spectral_eps: f64,
    pub range_lo: f64,
    pub range_hi: f64,
    pub acf_max_lag: usize,
    pub real_sequences: usize,
    pub synthetic_sequences: usize,
    pub real_values: usize,
    pub synthetic_values: usize,
    pub acf_skipped_real: usize,
    pub acf_skipped_synthetic: usize,
    pub spectral_common_len: usize,
    /// Generation seed when the synthetic side came from a seeded sampler.
    pub seed: Option<u64>,
    /// Kurtosis is reported non-excess (normal = 3).
    pub kurtosis_convention: String,
}

fn side<T>(r: Result<T>, which: &str) -> Result<T> {
    r.map_err(|e| Error::Contract(format!("{which} side: {e}")))
}

pub fn evaluation_report(
    real: &[Vec<f64>],
    synthetic: &[Vec<f64>],
    settings: &ReportSettings,
    seed: Option<u64>,
) -> Result<EvaluationReport> {
    if real.is_empty() || synthetic.is_empty() {
        return Err(Error::EmptyInput(
            "evaluation_report: both sample sets must be non-empty".into(),
        ));
    }
    let real_pool: Vec<f64> = real.iter().flatten().copied().collect();
    let synth_pool: Vec<f64> = synthetic.iter().flatten().copied().collect();
    if real_pool.is_empty() || synth_pool.is_empty() {
        return Err(Error::EmptyInput("evaluation_report: empty sequences".into()));
    }

    let m_real = side(moments(&real_pool), "real")?;
    let m_synth = side(moments(&synth_pool), "synthetic")?;

    // Shared binning over the union range of both pools.
    let lo = real_pool
        .iter()
        .chain(&synth_pool)
        .copied()
        .fold(f64::INFINITY, f64::min);
    let hi = real_pool
        .iter()
        .chain(&synth_pool)
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if !(lo < hi) {
        return Err(Error::Degenerate(
            "evaluation_report: pooled values span an empty range".into(),
        ));
    }
    let p = side(
        histogram(&real_pool, settings.bins, lo, hi, settings.hist_eps),
        "real",
    )?;
    let q = side(
        histogram(&synth_pool, settings.bins, lo, hi, settings.hist_eps),
        "synthetic",
    )?;
    let d_js = js_divergence(&p, &q)?;

    // Spectral score on batch-mean spectra, truncated to the shortest
    // sequence present on either side.
    let common_len = real
        .iter()
        .chain(synthetic)
        .map(Vec::len)
        .min()
        .expect("non-empty sets");
    if common_len == 0 {
        return Err(Error::EmptyInput("evaluation_report: zero-length sequence".into()));
    }
    let real_trunc: Vec<&[f64]> = real.iter().map(|s| &s[..common_len]).collect();
    let synth_trunc: Vec<&[f64]> = synthetic.iter().map(|s| &s[..common_len]).collect();
    let spectral = spectral_score(&real_trunc, &synth_trunc, settings.spectral_eps)?;

    let max_lag = settings.acf_max_lag.min(common_len - 1);
    let (acf_real, skipped_real) = side(acf_mean_over_sequences(real, max_lag), "real")?;
    let (acf_synth, skipped_synth) =
        side(acf_mean_over_sequences(synthetic, max_lag), "synthetic")?;

    Ok(EvaluationReport {
        moments: MomentPair {
            real: m_real,
            synthetic: m_synth,
        },
        d_js,
        spectral_score: spectral,
        acf: AcfCurves {
            lags: (0..=max_lag).collect(),
            real: acf_real,
            synthetic: acf_synth,
        },
        settings: ReportMeta {
            bins: settings.bins,
            hist_eps: settings.hist_eps,
            spectral_eps: settings.spectral_eps,
            range_lo: lo,
            range_hi: hi,
            acf_max_lag: max_lag,
            real_sequences: real.len(),
            synthetic_sequences: synthetic.len(),
            real_values: real_pool.len(),
            synthetic_values: synth_pool.len(),
            acf_skipped_real: skipped_real,
            acf_skipped_synthetic: skipped_synth,
            spectral_common_len: common_len,
            seed,
            kurtosis_convention: "pearson-non-excess".into(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_sequences(seed: u64, count: usize, len: usize) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| (0..len).map(|_| rng.random_range(0.0..1.0)).collect())
            .collect()
    }

    #[test]
    fn self_comparison_is_null() {
        let data = random_sequences(1, 5, 40);
        let report =
            evaluation_report(&data, &data, &ReportSettings::default(), None).unwrap();
        assert!(report.d_js < 1e-12);
        assert!(report.spectral_score < 1e-12);
        assert_eq!(report.moments.real, report.moments.synthetic);
        assert_eq!(report.acf.real, report.acf.synthetic);
        assert_eq!(report.acf.real[0], 1.0);
    }

    #[test]
    fn shuffling_within_sequences_keeps_marginals_but_breaks_dynamics() {
        // Build sequences with strong temporal structure, then shuffle each
        // one: identical pooled histogram, different ACF.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let real: Vec<Vec<f64>> = (0..6)
            .map(|_| {
                let mut x: f64 = rng.random_range(0.2..0.8);
                (0..60)
                    .map(|_| {
                        x = 0.95 * x + 0.05 * rng.random_range(0.0..1.0);
                        x
                    })
                    .collect()
            })
            .collect();
        let mut shuffled = real.clone();
        for seq in &mut shuffled {
            use rand::seq::SliceRandom;
            seq.shuffle(&mut rng);
        }
        let report =
            evaluation_report(&real, &shuffled, &ReportSettings::default(), None).unwrap();
        assert!(report.d_js < 1e-12, "d_js = {}", report.d_js);
        let diff: f64 = report
            .acf
            .real
            .iter()
            .zip(&report.acf.synthetic)
            .map(|(a, b)| (a - b).abs())
            .sum();
        assert!(diff > 0.5, "ACF curves barely differ: {diff}");
    }

    #[test]
    fn disjoint_supports_maximize_divergence() {
        let real = vec![vec![0.0, 0.1, 0.2, 0.15, 0.05]];
        let synth = vec![vec![0.8, 0.9, 1.0, 0.85, 0.95]];
        let settings = ReportSettings {
            hist_eps: 0.0,
            ..Default::default()
        };
        let report = evaluation_report(&real, &synth, &settings, None).unwrap();
        assert!((report.d_js - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_side_rejected() {
        let data = random_sequences(3, 2, 10);
        assert!(evaluation_report(&data, &[], &ReportSettings::default(), None).is_err());
    }

    #[test]
    fn report_serializes_with_stable_keys() {
        let data = random_sequences(4, 3, 20);
        let report =
            evaluation_report(&data, &data, &ReportSettings::default(), Some(7)).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert!(json.get("moments").and_then(|m| m.get("real")).is_some());
        assert!(json.get("d_js").is_some());
        assert!(json.get("spectral_score").is_some());
        assert!(json.get("acf").and_then(|a| a.get("lags")).is_some());
        assert!(json.get("settings").is_some());
        let back: EvaluationReport = serde_json::from_value(json).unwrap();
        assert_eq!(back.d_js, report.d_js);
    }
}
