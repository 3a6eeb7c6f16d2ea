//! Histogram estimation and the KL / Jensen–Shannon divergences.
//!
//! Divergences use base-2 logarithms, which bounds the Jensen–Shannon
//! divergence in [0, 1].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Discrete probability distribution over uniform bins.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HistogramDistribution {
    pub lo: f64,
    pub hi: f64,
    pub masses: Vec<f64>,
    /// Smoothing pseudo-count added to every bin before normalization.
    pub eps: f64,
}

impl HistogramDistribution {
    pub fn bins(&self) -> usize {
        self.masses.len()
    }

    fn same_binning(&self, other: &Self) -> bool {
        self.bins() == other.bins() && self.lo == other.lo && self.hi == other.hi
    }
}

/// Uniform histogram over [lo, hi] with left-closed/right-open bins (the
/// final bin is closed). Out-of-range samples are clamped into the boundary
/// bins. Masses are (count + eps) normalized to sum to one.
pub fn histogram(samples: &[f64], bins: usize, lo: f64, hi: f64, eps: f64) -> Result<HistogramDistribution> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("histogram of empty sample".into()));
    }
    if bins < 2 {
        return Err(Error::Contract(format!("histogram needs >= 2 bins, got {bins}")));
    }
    if !(lo < hi) {
        return Err(Error::Contract(format!(
            "histogram range must satisfy lo < hi, got [{lo}, {hi}]"
        )));
    }
    if eps < 0.0 {
        return Err(Error::Contract("histogram smoothing must be >= 0".into()));
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0.0_f64; bins];
    for &x in samples {
        let idx = ((x - lo) / width).floor() as isize;
        let idx = idx.clamp(0, bins as isize - 1) as usize;
        counts[idx] += 1.0;
    }
    let total: f64 = counts.iter().map(|c| c + eps).sum();
    let masses = counts.iter().map(|c| (c + eps) / total).collect();
    Ok(HistogramDistribution {
        lo,
        hi,
        masses,
        eps,
    })
}

/// Kullback–Leibler divergence Σ P·log₂(P/Q) with the 0·log(0/q) = 0
/// convention. P-mass on a zero-Q bin yields infinity.
pub fn kl_divergence(p: &HistogramDistribution, q: &HistogramDistribution) -> Result<f64> {
    if !p.same_binning(q) {
        return Err(Error::Contract(
            "kl_divergence: distributions use different binnings".into(),
        ));
    }
    Ok(kl_masses(&p.masses, &q.masses))
}

fn kl_masses(p: &[f64], q: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            if qi > 0.0 {
                acc += pi * (pi / qi).log2();
            } else {
                return f64::INFINITY;
            }
        }
    }
    acc
}

/// Jensen–Shannon divergence ½·KL(P‖M) + ½·KL(Q‖M) with M = ½(P+Q),
/// base 2: symmetric and bounded in [0, 1].
pub fn js_divergence(p: &HistogramDistribution, q: &HistogramDistribution) -> Result<f64> {
    if !p.same_binning(q) {
        return Err(Error::Contract(
            "js_divergence: distributions use different binnings".into(),
        ));
    }
    let m: Vec<f64> = p
        .masses
        .iter()
        .zip(&q.masses)
        .map(|(a, b)| 0.5 * (a + b))
        .collect();
    Ok(0.5 * kl_masses(&p.masses, &m) + 0.5 * kl_masses(&q.masses, &m))
}

/// Histogram pair on a shared binning spanning both sample sets, then their
/// Jensen–Shannon divergence. The usual path from raw values to a score.
pub fn js_from_samples(
    a: &[f64],
    b: &[f64],
    bins: usize,
    eps: f64,
) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("js_from_samples: empty sample set".into()));
    }
    let lo = a
        .iter()
        .chain(b)
        .copied()
        .fold(f64::INFINITY, f64::min);
    let hi = a
        .iter()
        .chain(b)
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if !(lo < hi) {
        return Err(Error::Degenerate(
            "js_from_samples: pooled samples span an empty range".into(),
        ));
    }
    let pa = histogram(a, bins, lo, hi, eps)?;
    let pb = histogram(b, bins, lo, hi, eps)?;
    js_divergence(&pa, &pb)
}

pub const DEFAULT_BINS: usize = 100;
pub const DEFAULT_HIST_EPS: f64 = 1e-10;
