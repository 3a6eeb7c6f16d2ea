//! Desk-scale sweep of all four generator/discriminator pairings with
//! windowed loss integrals and a declared winner.
//!
//! Run with: cargo run --release --example architecture_sweep

use gazegen::data::{crw_generate, segment, CrwParams, Normalizer};
use gazegen::gan::{architecture_sweep, ArchKind, GanConfig, SweepRanking};

fn main() -> gazegen::Result<()> {
    let walk = crw_generate(
        &CrwParams {
            mu_log: 0.0,
            sigma_log: 0.5,
            kappa: 4.0,
            initial_heading: 0.0,
            steps: 200 * 16 + 15,
        },
        5,
    )?;
    let normalizer = Normalizer::fit(&walk.velocity.values)?;
    let normalized = normalizer.normalize(&walk.velocity.values);
    let dataset = segment(&normalized, 16, 16)?;

    let base = GanConfig {
        generator: ArchKind::Lstm, // overridden per pairing
        discriminator: ArchKind::Cnn,
        sequence_length: 16,
        batch_size: 25,
        noise_dim: 12,
        epochs: 8,
        eval_count: 32,
        window_start: 3,
        seed: 11,
        ..Default::default()
    };
    let report = architecture_sweep(
        &dataset,
        normalizer,
        &base,
        SweepRanking::NormalizedProduct,
        true,
    )?;

    println!("pairing     spectral-integral  d_js-integral  s/epoch");
    for e in &report.entries {
        println!(
            "{:<11} {:>17.3} {:>14.4} {:>8.3}",
            e.name, e.spectral_integral, e.d_js_integral, e.mean_epoch_seconds
        );
    }
    println!(
        "winner by {:?}: {}",
        report.ranking,
        report.winner.as_deref().unwrap_or("none")
    );
    Ok(())
}
