//! Train a small spectrally regularized GAN on synthetic walk speeds and
//! watch the divergence fall, then sample from the trained model.
//!
//! Run with: cargo run --release --example train_gan

use gazegen::data::{crw_generate, segment, CrwParams, Normalizer};
use gazegen::gan::{generate, train_with, ArchKind, GanConfig};

fn main() -> gazegen::Result<()> {
    let params = CrwParams {
        mu_log: 0.0,
        sigma_log: 0.5,
        kappa: 4.0,
        initial_heading: 0.0,
        steps: 400 * 32 + 31,
    };
    let walk = crw_generate(&params, 21)?;
    let normalizer = Normalizer::fit(&walk.velocity.values)?;
    let normalized = normalizer.normalize(&walk.velocity.values);
    let dataset = segment(&normalized, 32, 32)?;
    println!("training on {} sequences of length 32", dataset.len());

    let config = GanConfig {
        generator: ArchKind::Lstm,
        discriminator: ArchKind::Cnn,
        sequence_length: 32,
        batch_size: 32,
        noise_dim: 16,
        epochs: 30,
        spectral_weight: 0.1,
        eval_count: 64,
        window_start: 10,
        seed: 3,
        ..Default::default()
    };
    let outcome = train_with(&dataset, normalizer, &config, true, |r| {
        if r.epoch % 5 == 0 || r.epoch == 1 {
            println!(
                "epoch {:3}  L_G {:7.4}  L_D {:7.4}  L_spectral {:9.4}  D_JS {:.4}  ({:.2}s)",
                r.epoch, r.l_g, r.l_d, r.l_spectral, r.d_js, r.seconds
            );
        }
        Ok(())
    })?;

    let first = outcome.history.first().unwrap();
    let last = outcome.history.last().unwrap();
    println!(
        "divergence {:.4} -> {:.4}, spectral {:.2} -> {:.2}",
        first.d_js, last.d_js, first.l_spectral, last.l_spectral
    );

    let samples = generate(&outcome.model, 3, 99)?;
    println!("three generated sequences (first 8 values, original units):");
    for seq in &samples {
        let head: Vec<String> = seq.iter().take(8).map(|v| format!("{v:.3}")).collect();
        println!("  [{} ...]", head.join(", "));
    }
    Ok(())
}
