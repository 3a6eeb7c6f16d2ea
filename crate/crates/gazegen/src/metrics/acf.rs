//! Autocorrelation: ACF(h) = Σ_{t=1}^{T−h}(X_t − X̄)(X_{t+h} − X̄) / Σ(X_t − X̄)².

use crate::error::{Error, Result};

pub fn acf(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let t_len = series.len();
    if max_lag >= t_len {
        return Err(Error::Contract(format!(
            "acf: max lag {max_lag} must be below series length {t_len}"
        )));
    }
    let mean = series.iter().sum::<f64>() / t_len as f64;
    let denom: f64 = series.iter().map(|x| (x - mean).powi(2)).sum();
    if denom == 0.0 {
        return Err(Error::Degenerate("acf of a constant series".into()));
    }
    let mut out = Vec::with_capacity(max_lag + 1);
    for h in 0..=max_lag {
        let num: f64 = (0..t_len - h)
            .map(|t| (series[t] - mean) * (series[t + h] - mean))
            .sum();
        out.push(num / denom);
    }
    Ok(out)
}

/// Pointwise mean of per-sequence ACF curves. Constant sequences cannot be
/// normalized and are skipped; the skip count is reported alongside.
pub fn acf_mean_over_sequences(
    sequences: &[Vec<f64>],
    max_lag: usize,
) -> Result<(Vec<f64>, usize)> {
    let mut acc = vec![0.0; max_lag + 1];
    let mut used = 0usize;
    let mut skipped = 0usize;
    for seq in sequences {
        match acf(seq, max_lag) {
            Ok(curve) => {
                for (a, v) in acc.iter_mut().zip(&curve) {
                    *a += v;
                }
                used += 1;
            }
            Err(Error::Degenerate(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    if used == 0 {
        return Err(Error::EmptyInput(
            "acf_mean_over_sequences: no non-degenerate sequences".into(),
        ));
    }
    for a in &mut acc {
        *a /= used as f64;
    }
    Ok((acc, skipped))
}
