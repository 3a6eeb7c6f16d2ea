//! Score a synthetic dataset against a real one: moments, Jensen–Shannon
//! divergence, spectral distance, and autocorrelation curves.
//!
//! Run with: cargo run --example evaluate_fidelity

use gazegen::data::{crw_generate, segment, CrwParams};
use gazegen::markov::{hmm_baum_welch, hmm_sample, HmmFitOptions};
use gazegen::metrics::{evaluation_report, ReportSettings};

fn main() -> gazegen::Result<()> {
    // "Real" data: correlated-random-walk speeds cut into sequences.
    let walk = crw_generate(
        &CrwParams {
            mu_log: -0.1,
            sigma_log: 0.4,
            kappa: 3.0,
            initial_heading: 0.0,
            steps: 12_000,
        },
        31,
    )?;
    let real = segment(&walk.velocity.values, 100, 100)?;

    // Synthetic data: an HMM fitted to the same speeds, then sampled.
    let fit = hmm_baum_welch(
        &walk.velocity.values,
        3,
        &HmmFitOptions {
            max_iter: 60,
            ..Default::default()
        },
    )?;
    let sampled = hmm_sample(&fit.model, 12_000, 77)?;
    let synthetic = segment(&sampled, 100, 100)?;

    let report = evaluation_report(&real, &synthetic, &ReportSettings::default(), Some(77))?;
    println!("D_JS            {:.5}", report.d_js);
    println!("spectral score  {:.5}", report.spectral_score);
    let fmt = |m: &gazegen::metrics::Moments| {
        format!(
            "mean {:.4}  std {:.4}  skew {:+.3}  kurt {:.3}",
            m.mean,
            m.std_dev,
            m.skewness.unwrap_or(f64::NAN),
            m.kurtosis.unwrap_or(f64::NAN)
        )
    };
    println!("real moments      {}", fmt(&report.moments.real));
    println!("synthetic moments {}", fmt(&report.moments.synthetic));
    println!("ACF (lags 0..5):");
    println!(
        "  real      {:?}",
        report.acf.real[..6]
            .iter()
            .map(|v| (v * 1000.0).round() / 1000.0)
            .collect::<Vec<_>>()
    );
    println!(
        "  synthetic {:?}",
        report.acf.synthetic[..6]
            .iter()
            .map(|v| (v * 1000.0).round() / 1000.0)
            .collect::<Vec<_>>()
    );
    Ok(())
}
