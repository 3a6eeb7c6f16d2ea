//! Simulate a correlated random walk, derive its speed series, and build a
//! normalized fixed-length training dataset from it.
//!
//! Run with: cargo run --example crw_dataset

use gazegen::data::{crw_generate, segment, CrwParams, Normalizer};
use gazegen::metrics::moments;

fn main() -> gazegen::Result<()> {
    let params = CrwParams {
        mu_log: -0.2,
        sigma_log: 0.6,
        kappa: 4.0,
        initial_heading: 0.0,
        steps: 20_000,
    };
    let walk = crw_generate(&params, 7)?;
    println!(
        "simulated {} steps; final position ({:.1}, {:.1})",
        params.steps,
        walk.positions.last().unwrap().0,
        walk.positions.last().unwrap().1
    );

    let speeds = &walk.velocity.values;
    let m = moments(speeds)?;
    println!(
        "speed moments: mean {:.4}  std {:.4}  skew {:.3}  kurt {:.3}",
        m.mean,
        m.std_dev,
        m.skewness.unwrap(),
        m.kurtosis.unwrap()
    );

    let normalizer = Normalizer::fit(speeds)?;
    let normalized = normalizer.normalize(speeds);
    let dataset = segment(&normalized, 200, 200)?;
    println!(
        "normalizer range [{:.4}, {:.4}]; dataset: {} sequences of length 200",
        normalizer.min,
        normalizer.max,
        dataset.len()
    );

    let out = std::path::Path::new("examples_out");
    gazegen::data::io::save_sequences(out.join("crw_dataset.csv"), &dataset)?;
    gazegen::data::io::save_velocity_csv(out.join("crw_velocity.csv"), speeds, 1.0)?;
    println!("wrote examples_out/crw_dataset.csv and examples_out/crw_velocity.csv");
    Ok(())
}
