//! k-th order KDE Markov model: Silverman bandwidth, conditional densities,
//! and conditional sampling that continues a series.
//!
//! Run with: cargo run --example kde_markov

use gazegen::markov::{kde_markov_sample, KdeMarkovModel};
use gazegen::metrics::js_from_samples;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gazegen::Result<()> {
    // An autocorrelated series with a skewed marginal.
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut x = 0.5_f64;
    let series: Vec<f64> = (0..3000)
        .map(|_| {
            x = 0.8 * x + 0.2 * rng.random_range(0.0..1.0_f64).powi(2) * 3.0;
            x
        })
        .collect();

    let model = KdeMarkovModel::fit(&series, 1)?;
    println!(
        "order {} model on {} samples, Silverman bandwidth h = {:.4}",
        model.order,
        model.data.len(),
        model.bandwidth
    );

    // The conditional density shifts with the conditioning history.
    for hist in [0.3, 1.0, 2.0] {
        let dens: Vec<String> = [0.25, 0.75, 1.5, 2.5]
            .iter()
            .map(|&q| format!("p({q:.2})={:.3}", model.conditional_density(&[hist], q).unwrap()))
            .collect();
        println!("  given previous = {hist:.2}: {}", dens.join("  "));
    }

    let sample = kde_markov_sample(&model, 20_000, 9, &series[series.len() - 1..])?;
    let d = js_from_samples(&series, &sample.values, 80, 1e-10)?;
    println!(
        "sampled {} steps ({} marginal fallbacks); marginal divergence vs training data: {:.4}",
        sample.values.len(),
        sample.marginal_fallbacks,
        d
    );
    Ok(())
}
