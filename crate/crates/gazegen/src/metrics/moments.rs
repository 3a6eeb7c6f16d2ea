//! Sample moment statistics: mean, standard deviation (N−1 denominator),
//! skewness m₃/m₂^{3/2}, and Pearson (non-excess) kurtosis m₄/m₂², where the
//! central moments mₖ use the 1/N convention.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub std_dev: f64,
    /// None for a constant series, where the moment ratios degenerate.
    pub skewness: Option<f64>,
    /// Non-excess convention: a normal distribution sits at 3.
    pub kurtosis: Option<f64>,
}

pub fn moments(series: &[f64]) -> Result<Moments> {
    let n = series.len();
    if n < 2 {
        return Err(Error::Contract(format!(
            "moments need at least 2 samples, got {n}"
        )));
    }
    let nf = n as f64;
    let mean = series.iter().sum::<f64>() / nf;
    let ss: f64 = series.iter().map(|x| (x - mean).powi(2)).sum();
    let std_dev = (ss / (nf - 1.0)).sqrt();

    let m2 = ss / nf;
    if m2 == 0.0 {
        return Ok(Moments {
            mean,
            std_dev,
            skewness: None,
            kurtosis: None,
        });
    }
    let m3: f64 = series.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / nf;
    let m4: f64 = series.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / nf;
    Ok(Moments {
        mean,
        std_dev,
        skewness: Some(m3 / m2.powf(1.5)),
        kurtosis: Some(m4 / (m2 * m2)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn small_series_closed_form() {
        let m = moments(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(m.mean, 2.0);
        assert!((m.std_dev - 1.0).abs() < 1e-15);
    }

    #[test]
    fn standard_normal_draws_hit_theory() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let draws: Vec<f64> = (0..1_000_000)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let m = moments(&draws).unwrap();
        assert!(m.skewness.unwrap().abs() < 0.01, "skew {:?}", m.skewness);
        assert!(
            (m.kurtosis.unwrap() - 3.0).abs() < 0.05,
            "kurt {:?}",
            m.kurtosis
        );
    }

    #[test]
    fn constant_series_degenerates_but_keeps_mean_and_std() {
        let m = moments(&[4.0; 10]).unwrap();
        assert_eq!(m.mean, 4.0);
        assert_eq!(m.std_dev, 0.0);
        assert!(m.skewness.is_none());
        assert!(m.kurtosis.is_none());
    }

    #[test]
    fn too_short_series_rejected() {
        assert!(moments(&[1.0]).is_err());
    }

    proptest! {
        #[test]
        fn affine_map_behaviour(
            base in proptest::collection::vec(-10.0..10.0f64, 20..40),
            scale in 0.1..5.0f64,
            shift in -100.0..100.0f64,
        ) {
            prop_assume!(base.iter().any(|&x| (x - base[0]).abs() > 1e-6));
            let mapped: Vec<f64> = base.iter().map(|x| scale * x + shift).collect();
            let a = moments(&base).unwrap();
            let b = moments(&mapped).unwrap();
            // mean shifts, std scales, shape moments are invariant under a
            // positive affine map.
            prop_assert!((b.mean - (scale * a.mean + shift)).abs() < 1e-8);
            prop_assert!((b.std_dev - scale * a.std_dev).abs() / a.std_dev.max(1e-8) < 1e-8);
            prop_assert!((b.skewness.unwrap() - a.skewness.unwrap()).abs() < 1e-8);
            prop_assert!((b.kurtosis.unwrap() - a.kurtosis.unwrap()).abs() < 1e-6);
        }
    }
}
