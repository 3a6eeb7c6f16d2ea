//! Inspect DFT spectra and the spectral loss: identical batches score zero,
//! circular shifts are invisible to the magnitude spectrum, and genuinely
//! different signals are penalized.
//!
//! Run with: cargo run --example spectral_analysis

use gazegen::neural::{Tape, Tensor};
use gazegen::spectral::{dft, log_magnitude, spectral_loss};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gazegen::Result<()> {
    let n = 64;
    let mut rng = ChaCha8Rng::seed_from_u64(11);

    // A two-tone signal plus noise.
    let signal: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64;
            (2.0 * std::f64::consts::PI * 4.0 * t / n as f64).sin()
                + 0.5 * (2.0 * std::f64::consts::PI * 11.0 * t / n as f64).sin()
                + 0.1 * rng.random_range(-1.0..1.0)
        })
        .collect();

    let spec = dft(&signal)?;
    let mags = log_magnitude(&spec, 1e-8)?;
    println!("conjugate symmetry error: {:.2e}", spec.conjugate_symmetry_error());
    println!("five strongest bins (bin, log(|F|+eps)):");
    let mut order: Vec<usize> = (1..n / 2).collect();
    order.sort_by(|&a, &b| mags[b].partial_cmp(&mags[a]).unwrap());
    for &k in order.iter().take(5) {
        println!("  k = {k:2}: {:.3}", mags[k]);
    }

    // Spectral loss of a batch against itself, a shifted copy, and noise.
    let mut shifted = signal.clone();
    shifted.rotate_left(17);
    let noise: Vec<f64> = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();

    for (label, candidate) in [
        ("identical", signal.clone()),
        ("circular shift", shifted),
        ("white noise", noise),
    ] {
        let mut tape = Tape::new();
        let node = tape.constant(Tensor::from_vec(&[1, n], candidate)?);
        let loss = spectral_loss(&mut tape, &[signal.as_slice()], node, 1e-8)?;
        println!("spectral loss vs {label:>14}: {:.6}", tape.scalar_value(loss));
    }
    Ok(())
}
