//! Fit Gaussian-emission hidden Markov models by Baum–Welch: recover a
//! known model, select the state count by divergence, and sample from the
//! winner.
//!
//! Run with: cargo run --example hmm_baseline

use gazegen::markov::{
    hmm_baum_welch, hmm_sample, hmm_state_selection, HmmFitOptions, HmmModel,
};

fn main() -> gazegen::Result<()> {
    // A three-regime process: slow drift, medium motion, fast jumps.
    let truth = HmmModel {
        n_states: 3,
        pi: vec![0.5, 0.3, 0.2],
        trans: vec![0.90, 0.08, 0.02, 0.10, 0.85, 0.05, 0.05, 0.15, 0.80],
        means: vec![0.2, 1.5, 4.0],
        vars: vec![0.02, 0.1, 0.3],
    };
    let observations = hmm_sample(&truth, 4000, 17)?;
    println!("generated {} observations from a 3-state model", observations.len());

    let fit = hmm_baum_welch(&observations, 3, &HmmFitOptions::default())?;
    println!(
        "refit in {} iterations (converged: {}), log-likelihood {:.1}",
        fit.trace.log_likelihood.len(),
        fit.trace.converged,
        fit.trace.log_likelihood.last().unwrap()
    );
    let mut means = fit.model.means.clone();
    means.sort_by(|a, b| a.partial_cmp(b).unwrap());
    println!("recovered means: {means:.3?} (truth: [0.2, 1.5, 4.0])");

    let opts = HmmFitOptions {
        max_iter: 100,
        ..Default::default()
    };
    let selection = hmm_state_selection(&observations, 2..=5, &opts, 100, 1e-10)?;
    println!("state-count selection (divergence between data and model sample):");
    for row in &selection.table {
        let marker = if row.states == selection.selected { " <- selected" } else { "" };
        println!("  {} states: D_JS = {:.5}{marker}", row.states, row.d_js);
    }

    let synthetic = hmm_sample(&fit.model, 12, 5)?;
    let head: Vec<String> = synthetic.iter().map(|v| format!("{v:.2}")).collect();
    println!("sampled continuation: [{}]", head.join(", "));
    Ok(())
}
