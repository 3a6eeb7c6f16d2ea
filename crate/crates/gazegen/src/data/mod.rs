//! Gaze recordings, velocity derivation, MinMax normalization, fixed-length
//! segmentation, and the correlated-random-walk synthetic data source.

pub mod crw;
pub mod io;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use crw::{crw_generate, normal_quantile, sample_von_mises, CrwParams, CrwOutput};
pub use io::{load_recording, load_sequences, load_velocity_csv, save_sequences, save_velocity_csv};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceTag {
    Left,
    Right,
    Synthetic,
}

/// Raw binocular gaze positions in screen pixels.
#[derive(Clone, Debug)]
pub struct GazeRecording {
    /// Milliseconds between consecutive samples.
    pub sample_interval_ms: f64,
    pub left: Vec<(f64, f64)>,
    pub right: Vec<(f64, f64)>,
    pub timestamps_ms: Option<Vec<f64>>,
}

impl GazeRecording {
    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    pub fn eye(&self, side: SourceTag) -> &[(f64, f64)] {
        match side {
            SourceTag::Right => &self.right,
            _ => &self.left,
        }
    }
}

/// Scalar gaze speed per sample, pixels per millisecond.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VelocitySeries {
    pub values: Vec<f64>,
    pub sample_interval_ms: f64,
    pub source: SourceTag,
}

/// v_t = ‖p_{t+1} − p_t‖ / dt; output is one shorter than the input.
pub fn compute_velocity(positions: &[(f64, f64)], dt_ms: f64) -> Result<Vec<f64>> {
    if positions.len() < 2 {
        return Err(Error::Contract(format!(
            "velocity needs at least 2 positions, got {}",
            positions.len()
        )));
    }
    if dt_ms <= 0.0 {
        return Err(Error::Contract(format!(
            "sample interval must be positive, got {dt_ms}"
        )));
    }
    Ok(positions
        .windows(2)
        .map(|w| {
            let dx = w[1].0 - w[0].0;
            let dy = w[1].1 - w[0].1;
            (dx * dx + dy * dy).sqrt() / dt_ms
        })
        .collect())
}

/// MinMax scaling fitted on training data: min ↦ 0, max ↦ 1.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct Normalizer {
    pub min: f64,
    pub max: f64,
}

impl Normalizer {
    pub fn fit(series: &[f64]) -> Result<Self> {
        if series.is_empty() {
            return Err(Error::EmptyInput("normalizer fit on empty series".into()));
        }
        let min = series.iter().copied().fold(f64::INFINITY, f64::min);
        let max = series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(min < max) {
            return Err(Error::Degenerate(format!(
                "normalizer fit on constant series (value {min})"
            )));
        }
        Ok(Normalizer { min, max })
    }

    /// Values outside the fitted range map outside [0, 1]; they are counted
    /// by [`Normalizer::out_of_range`] rather than clamped, so
    /// denormalization stays exact.
    pub fn normalize(&self, series: &[f64]) -> Vec<f64> {
        let span = self.max - self.min;
        series.iter().map(|v| (v - self.min) / span).collect()
    }

    pub fn denormalize(&self, series: &[f64]) -> Vec<f64> {
        let span = self.max - self.min;
        series.iter().map(|v| self.min + v * span).collect()
    }

    pub fn out_of_range(&self, series: &[f64]) -> usize {
        series
            .iter()
            .filter(|&&v| v < self.min || v > self.max)
            .count()
    }
}

/// Full windows [i·stride, i·stride + length); the trailing remainder is
/// dropped.
pub fn segment(series: &[f64], length: usize, stride: usize) -> Result<Vec<Vec<f64>>> {
    if length < 2 {
        return Err(Error::Contract(format!(
            "segment length must be >= 2, got {length}"
        )));
    }
    if stride < 1 {
        return Err(Error::Contract("segment stride must be >= 1".into()));
    }
    let mut out = Vec::new();
    let mut start = 0usize;
    while start + length <= series.len() {
        out.push(series[start..start + length].to_vec());
        start += stride;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn velocity_three_four_five() {
        let v = compute_velocity(&[(0.0, 0.0), (3.0, 4.0)], 1.0).unwrap();
        assert_eq!(v, vec![5.0]);
    }

    #[test]
    fn stationary_gaze_has_zero_velocity() {
        let v = compute_velocity(&[(2.0, 2.0); 5], 1.0).unwrap();
        assert_eq!(v, vec![0.0; 4]);
    }

    #[test]
    fn velocity_scales_with_interval() {
        let v = compute_velocity(&[(0.0, 0.0), (4.0, 0.0)], 2.0).unwrap();
        assert_eq!(v, vec![2.0]);
    }

    #[test]
    fn velocity_needs_two_points() {
        assert!(compute_velocity(&[(1.0, 1.0)], 1.0).is_err());
    }

    #[test]
    fn normalizer_maps_extremes() {
        let norm = Normalizer::fit(&[2.0, 4.0, 6.0]).unwrap();
        assert_eq!(norm.normalize(&[2.0, 4.0, 6.0]), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn normalizer_rejects_constant_series() {
        assert!(matches!(
            Normalizer::fit(&[3.0; 4]),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn out_of_range_values_flagged_not_clamped() {
        let norm = Normalizer::fit(&[0.0, 10.0]).unwrap();
        let mapped = norm.normalize(&[-5.0, 15.0]);
        assert_eq!(mapped, vec![-0.5, 1.5]);
        assert_eq!(norm.out_of_range(&[-5.0, 5.0, 15.0]), 2);
    }

    #[test]
    fn segment_counts() {
        let series: Vec<f64> = (0..450).map(|i| i as f64).collect();
        assert_eq!(segment(&series, 200, 200).unwrap().len(), 2);
        let series: Vec<f64> = (0..199).map(|i| i as f64).collect();
        assert_eq!(segment(&series, 200, 200).unwrap().len(), 0);
        let series: Vec<f64> = (0..400).map(|i| i as f64).collect();
        assert_eq!(segment(&series, 200, 100).unwrap().len(), 3);
    }

    #[test]
    fn segments_partition_a_prefix() {
        let series: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let segs = segment(&series, 3, 3).unwrap();
        let flat: Vec<f64> = segs.into_iter().flatten().collect();
        assert_eq!(flat, &series[..9]);
    }

    proptest! {
        #[test]
        fn normalize_roundtrip(values in proptest::collection::vec(-1e6..1e6f64, 2..100)) {
            prop_assume!(values.iter().any(|&v| (v - values[0]).abs() > 1e-9));
            let norm = Normalizer::fit(&values).unwrap();
            let round = norm.denormalize(&norm.normalize(&values));
            for (a, b) in values.iter().zip(&round) {
                prop_assert!((a - b).abs() < 1e-6 * a.abs().max(1.0));
            }
            let mapped = norm.normalize(&values);
            prop_assert!(mapped.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v)));
        }

        #[test]
        fn segment_count_formula(
            t in 0usize..600,
            length in 2usize..50,
            stride in 1usize..50,
        ) {
            let series: Vec<f64> = (0..t).map(|i| i as f64).collect();
            let got = segment(&series, length, stride).unwrap().len();
            let want = if t >= length { (t - length) / stride + 1 } else { 0 };
            prop_assert_eq!(got, want);
        }
    }
}
