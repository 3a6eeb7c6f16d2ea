//! Discrete Fourier transform of real series and the spectral loss that
//! regularizes the generator.
//!
//! The transform is the direct O(N²) summation
//! F(x)_k = Σ_{n=0}^{N−1} x_n·e^{−2πi·kn/N}; at the sequence lengths used
//! here (N = 200) this is both fast enough and its own specification.

use crate::error::{Error, Result};
use crate::neural::tape::{NodeId, Tape};
use crate::neural::tensor::Tensor;

/// Complex DFT coefficients of a real series.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    /// Length of the series the spectrum came from (equals the bin count).
    pub source_len: usize,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.re.len()
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }

    pub fn magnitude(&self, k: usize) -> f64 {
        (self.re[k] * self.re[k] + self.im[k] * self.im[k]).sqrt()
    }

    /// Worst deviation from the real-input conjugate symmetry
    /// F_k = conj(F_{N−k}).
    pub fn conjugate_symmetry_error(&self) -> f64 {
        let n = self.len();
        let mut worst = 0.0_f64;
        for k in 1..n {
            let dr = (self.re[k] - self.re[n - k]).abs();
            let di = (self.im[k] + self.im[n - k]).abs();
            worst = worst.max(dr).max(di);
        }
        worst
    }
}

/// cos/sin of 2π·m/n for m = 0..n−1; kn mod n walks this table.
fn trig_tables(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut cos_t = vec![0.0; n];
    let mut sin_t = vec![0.0; n];
    for (m, (c, s)) in cos_t.iter_mut().zip(sin_t.iter_mut()).enumerate() {
        let theta = 2.0 * std::f64::consts::PI * m as f64 / n as f64;
        *c = theta.cos();
        *s = theta.sin();
    }
    (cos_t, sin_t)
}

pub fn dft(x: &[f64]) -> Result<Spectrum> {
    let n = x.len();
    if n == 0 {
        return Err(Error::EmptyInput("dft of empty series".into()));
    }
    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("dft input".into()));
    }
    let (cos_t, sin_t) = trig_tables(n);
    let mut re = vec![0.0; n];
    let mut im = vec![0.0; n];
    for k in 0..n {
        let mut sr = 0.0;
        let mut si = 0.0;
        let mut m = 0usize;
        for &v in x {
            sr += v * cos_t[m];
            si -= v * sin_t[m];
            m += k;
            if m >= n {
                m -= n;
            }
        }
        re[k] = sr;
        im[k] = si;
    }
    Ok(Spectrum {
        re,
        im,
        source_len: n,
    })
}

/// log(|F_k| + eps) per bin; eps guards log(0).
pub fn log_magnitude(spec: &Spectrum, eps: f64) -> Result<Vec<f64>> {
    if eps <= 0.0 {
        return Err(Error::Contract(format!(
            "log_magnitude: eps must be > 0, got {eps}"
        )));
    }
    Ok((0..spec.len())
        .map(|k| (spec.magnitude(k) + eps).ln())
        .collect())
}

/// Mean log-magnitude spectrum over a batch of equal-length sequences.
pub fn mean_log_magnitude(batch: &[&[f64]], eps: f64) -> Result<Vec<f64>> {
    if batch.is_empty() {
        return Err(Error::EmptyInput("mean_log_magnitude of empty batch".into()));
    }
    let n = batch[0].len();
    let mut acc = vec![0.0; n];
    for seq in batch {
        if seq.len() != n {
            return Err(Error::Dimension(format!(
                "mean_log_magnitude: lengths {n} vs {}",
                seq.len()
            )));
        }
        let lm = log_magnitude(&dft(seq)?, eps)?;
        for (a, v) in acc.iter_mut().zip(&lm) {
            *a += v;
        }
    }
    for a in &mut acc {
        *a /= batch.len() as f64;
    }
    Ok(acc)
}

/// Non-differentiable spectral distance between two batches: the summed
/// squared difference of their batch-mean log-magnitude spectra.
pub fn spectral_score(real: &[&[f64]], synthetic: &[&[f64]], eps: f64) -> Result<f64> {
    let a = mean_log_magnitude(real, eps)?;
    let b = mean_log_magnitude(synthetic, eps)?;
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "spectral_score: lengths {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// Differentiable spectral loss between a real batch and a generated batch
/// on the tape. Both sides are reduced to their batch-mean log-magnitude
/// spectrum; the loss is the summed squared per-bin difference, and its
/// gradient flows into `generated`.
///
/// `generated` may be [batch, n] or [batch, 1, n].
pub fn spectral_loss(
    tape: &mut Tape,
    real: &[&[f64]],
    generated: NodeId,
    eps: f64,
) -> Result<NodeId> {
    if real.is_empty() {
        return Err(Error::EmptyInput("spectral_loss: empty real batch".into()));
    }
    let gshape = tape.shape(generated).to_vec();
    let gen2d = match gshape.len() {
        2 => generated,
        3 if gshape[1] == 1 => tape.reshape(generated, &[gshape[0], gshape[2]])?,
        _ => {
            return Err(Error::Dimension(format!(
                "spectral_loss: generated shape {gshape:?}"
            )))
        }
    };
    let n = tape.shape(gen2d)[1];
    if real.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension(format!(
            "spectral_loss: real sequences must have length {n}"
        )));
    }
    let real_mean = mean_log_magnitude(real, eps)?;
    let real_node = tape.constant(Tensor::from_vec(&[n], real_mean)?);

    let gen_spectra = tape.log_mag_spectrum(gen2d, eps)?;
    let gen_mean = tape.mean_rows(gen_spectra)?;
    let diff = tape.sub(gen_mean, real_node)?;
    let sq = tape.mul(diff, diff)?;
    Ok(tape.sum_all(sq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const EPS: f64 = 1e-8;

    fn naive_dft(x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = x.len();
        let mut re = vec![0.0; n];
        let mut im = vec![0.0; n];
        for k in 0..n {
            for (i, &v) in x.iter().enumerate() {
                let theta = -2.0 * std::f64::consts::PI * (k * i) as f64 / n as f64;
                re[k] += v * theta.cos();
                im[k] += v * theta.sin();
            }
        }
        (re, im)
    }

    #[test]
    fn constant_signal_concentrates_in_bin_zero() {
        let c = 2.5;
        let n = 16;
        let spec = dft(&vec![c; n]).unwrap();
        assert!((spec.re[0] - c * n as f64).abs() < 1e-10);
        for k in 1..n {
            assert!(spec.magnitude(k) < 1e-10, "bin {k}");
        }
    }

    #[test]
    fn delta_signal_has_flat_spectrum() {
        let mut x = vec![0.0; 12];
        x[0] = 1.0;
        let spec = dft(&x).unwrap();
        for k in 0..12 {
            assert!((spec.magnitude(k) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn matches_direct_summation_at_length_200() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x: Vec<f64> = (0..200).map(|_| rng.random_range(-1.0..1.0)).collect();
        let spec = dft(&x).unwrap();
        let (re, im) = naive_dft(&x);
        for k in 0..200 {
            assert!((spec.re[k] - re[k]).abs() < 1e-9);
            assert!((spec.im[k] - im[k]).abs() < 1e-9);
        }
    }

    #[test]
    fn parseval_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let x: Vec<f64> = (0..64).map(|_| rng.random_range(-2.0..2.0)).collect();
        let spec = dft(&x).unwrap();
        let time: f64 = x.iter().map(|v| v * v).sum();
        let freq: f64 = (0..64)
            .map(|k| spec.re[k] * spec.re[k] + spec.im[k] * spec.im[k])
            .sum::<f64>()
            / 64.0;
        assert!((time - freq).abs() / time.abs() < 1e-10);
    }

    #[test]
    fn conjugate_symmetry_for_real_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x: Vec<f64> = (0..33).map(|_| rng.random_range(-1.0..1.0)).collect();
        let spec = dft(&x).unwrap();
        assert!(spec.conjugate_symmetry_error() < 1e-10);
    }

    #[test]
    fn dft_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 40;
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (a, b) = (1.7, -0.4);
        let combo: Vec<f64> = x.iter().zip(&y).map(|(xv, yv)| a * xv + b * yv).collect();
        let sc = dft(&combo).unwrap();
        let sx = dft(&x).unwrap();
        let sy = dft(&y).unwrap();
        for k in 0..n {
            assert!((sc.re[k] - (a * sx.re[k] + b * sy.re[k])).abs() < 1e-10);
            assert!((sc.im[k] - (a * sx.im[k] + b * sy.im[k])).abs() < 1e-10);
        }
    }

    #[test]
    fn empty_series_rejected() {
        assert!(matches!(dft(&[]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn log_magnitude_trivial_cases() {
        // Constant signal of ones, n = 4: bin 0 holds log(4 + eps),
        // every other bin holds log(eps).
        let spec = dft(&[1.0; 4]).unwrap();
        let lm = log_magnitude(&spec, EPS).unwrap();
        assert!((lm[0] - (4.0 + EPS).ln()).abs() < 1e-12);
        for k in 1..4 {
            // Tiny numerical magnitudes in the "zero" bins shift the value
            // inside the eps guard only negligibly.
            assert!((lm[k] - EPS.ln()).abs() < 1e-2, "bin {k}: {}", lm[k]);
        }

        let mut delta = vec![0.0; 6];
        delta[0] = 1.0;
        let lm = log_magnitude(&dft(&delta).unwrap(), EPS).unwrap();
        for v in lm {
            assert!((v - (1.0 + EPS).ln()).abs() < 1e-10);
        }
    }

    #[test]
    fn log_magnitude_matches_scalar_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let x: Vec<f64> = (0..17).map(|_| rng.random_range(-1.0..1.0)).collect();
        let spec = dft(&x).unwrap();
        let lm = log_magnitude(&spec, EPS).unwrap();
        for k in 0..17 {
            let want = ((spec.re[k].powi(2) + spec.im[k].powi(2)).sqrt() + EPS).ln();
            assert!((lm[k] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn loss_vanishes_on_identical_batches() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let rows: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..32).map(|_| rng.random_range(0.0..1.0)).collect())
            .collect();
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let mut tape = Tape::new();
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let gen = tape.constant(Tensor::from_vec(&[3, 32], flat).unwrap());
        let loss = spectral_loss(&mut tape, &refs, gen, EPS).unwrap();
        assert!(tape.scalar_value(loss) < 1e-12);
    }

    #[test]
    fn loss_is_shift_invariant_for_single_sequences() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let row: Vec<f64> = (0..48).map(|_| rng.random_range(0.0..1.0)).collect();
        let mut shifted = row.clone();
        shifted.rotate_left(13);
        let mut tape = Tape::new();
        let gen = tape.constant(Tensor::from_vec(&[1, 48], shifted).unwrap());
        let loss = spectral_loss(&mut tape, &[&row], gen, EPS).unwrap();
        assert!(tape.scalar_value(loss) < 1e-10);
    }

    #[test]
    fn loss_matches_direct_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let real: Vec<Vec<f64>> = (0..2)
            .map(|_| (0..24).map(|_| rng.random_range(0.0..1.0)).collect())
            .collect();
        let synth: Vec<Vec<f64>> = (0..2)
            .map(|_| (0..24).map(|_| rng.random_range(0.0..1.0)).collect())
            .collect();
        let real_refs: Vec<&[f64]> = real.iter().map(|r| r.as_slice()).collect();
        let synth_refs: Vec<&[f64]> = synth.iter().map(|r| r.as_slice()).collect();

        let mut tape = Tape::new();
        let flat: Vec<f64> = synth.iter().flatten().copied().collect();
        let gen = tape.constant(Tensor::from_vec(&[2, 24], flat).unwrap());
        let loss = spectral_loss(&mut tape, &real_refs, gen, EPS).unwrap();

        let want = spectral_score(&real_refs, &synth_refs, EPS).unwrap();
        let got = tape.scalar_value(loss);
        assert!((got - want).abs() / want.abs().max(1e-300) < 1e-10);
    }

    #[test]
    fn loss_is_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let real: Vec<f64> = (0..16).map(|_| rng.random_range(0.0..1.0)).collect();
            let synth: Vec<f64> = (0..16).map(|_| rng.random_range(0.0..1.0)).collect();
            let mut tape = Tape::new();
            let gen = tape.constant(Tensor::from_vec(&[1, 16], synth).unwrap());
            let loss = spectral_loss(&mut tape, &[real.as_slice()], gen, EPS).unwrap();
            assert!(tape.scalar_value(loss) >= 0.0);
        }
    }
}
