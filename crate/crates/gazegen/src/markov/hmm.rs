//! Gaussian-emission hidden Markov models: scaled forward–backward,
//! Baum–Welch fitting, sequence sampling, and state-count selection.
//!
//! The forward/backward recursions carry per-step normalization constants
//! c_t so that sequences of hundreds of steps do not underflow; the scaled
//! quantities reproduce the unscaled occupancy and transition expectations
//! exactly, and the log-likelihood is −Σ_t ln c_t.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::histogram::{js_from_samples, DEFAULT_BINS, DEFAULT_HIST_EPS};

/// Smallest admissible emission variance; prevents collapse onto a point.
pub const VAR_FLOOR: f64 = 1e-10;

/// Emission density floor against total underflow on outliers.
const EMISSION_FLOOR: f64 = 1e-300;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct HmmModel {
    pub n_states: usize,
    /// Initial distribution π.
    pub pi: Vec<f64>,
    /// Row-major transition matrix A.
    pub trans: Vec<f64>,
    /// Per-state Gaussian emission means.
    pub means: Vec<f64>,
    /// Per-state Gaussian emission variances.
    pub vars: Vec<f64>,
}

impl HmmModel {
    pub fn validate(&self) -> Result<()> {
        let n = self.n_states;
        if n == 0 {
            return Err(Error::Config("hmm: need at least one state".into()));
        }
        if self.pi.len() != n
            || self.trans.len() != n * n
            || self.means.len() != n
            || self.vars.len() != n
        {
            return Err(Error::Dimension(format!(
                "hmm: parameter lengths inconsistent with {n} states"
            )));
        }
        let pi_sum: f64 = self.pi.iter().sum();
        if (pi_sum - 1.0).abs() > 1e-10 || self.pi.iter().any(|&p| p < 0.0) {
            return Err(Error::Config(format!(
                "hmm: initial distribution sums to {pi_sum}"
            )));
        }
        for i in 0..n {
            let row = &self.trans[i * n..(i + 1) * n];
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-10 || row.iter().any(|&p| p < 0.0) {
                return Err(Error::Config(format!("hmm: transition row {i} sums to {s}")));
            }
        }
        if self.vars.iter().any(|&v| v < VAR_FLOOR) {
            return Err(Error::Config(format!(
                "hmm: emission variance below floor {VAR_FLOOR}"
            )));
        }
        if !self.pi.iter().all(|v| v.is_finite())
            || !self.trans.iter().all(|v| v.is_finite())
            || !self.means.iter().all(|v| v.is_finite())
            || !self.vars.iter().all(|v| v.is_finite())
        {
            return Err(Error::NonFinite("hmm parameters".into()));
        }
        Ok(())
    }

    fn emission(&self, state: usize, obs: f64) -> f64 {
        gaussian_pdf(obs, self.means[state], self.vars[state]).max(EMISSION_FLOOR)
    }
}

pub fn gaussian_pdf(x: f64, mean: f64, var: f64) -> f64 {
    let z = (x - mean) * (x - mean) / (2.0 * var);
    (-z).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

/// Scaled forward/backward variables plus the expectations derived from
/// them. Layout: alpha/beta/gamma are [t × n_states], xi is
/// [(t−1) × n_states × n_states].
#[derive(Clone, Debug)]
pub struct ForwardBackwardResult {
    pub alpha_hat: Vec<f64>,
    pub beta_hat: Vec<f64>,
    pub scales: Vec<f64>,
    pub log_likelihood: f64,
    pub gamma: Vec<f64>,
    pub xi: Vec<f64>,
    pub len: usize,
    pub n_states: usize,
}

impl ForwardBackwardResult {
    pub fn gamma_at(&self, t: usize) -> &[f64] {
        &self.gamma[t * self.n_states..(t + 1) * self.n_states]
    }

    pub fn xi_at(&self, t: usize) -> &[f64] {
        let nn = self.n_states * self.n_states;
        &self.xi[t * nn..(t + 1) * nn]
    }
}

pub fn hmm_forward_backward(model: &HmmModel, obs: &[f64]) -> Result<ForwardBackwardResult> {
    model.validate()?;
    let t_len = obs.len();
    if t_len == 0 {
        return Err(Error::EmptyInput("forward-backward on empty observations".into()));
    }
    let n = model.n_states;

    // Forward pass with per-step scaling: alpha_hat_t = alpha_t / P(o_1..t).
    let mut alpha_hat = vec![0.0; t_len * n];
    let mut scales = vec![0.0; t_len];
    for j in 0..n {
        alpha_hat[j] = model.pi[j] * model.emission(j, obs[0]);
    }
    let s0: f64 = alpha_hat[..n].iter().sum();
    if s0 <= 0.0 || !s0.is_finite() {
        return Err(Error::Degenerate("zero forward mass at step 0".into()));
    }
    scales[0] = 1.0 / s0;
    for j in 0..n {
        alpha_hat[j] *= scales[0];
    }
    for t in 1..t_len {
        for j in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                acc += alpha_hat[(t - 1) * n + i] * model.trans[i * n + j];
            }
            alpha_hat[t * n + j] = acc * model.emission(j, obs[t]);
        }
        let s: f64 = alpha_hat[t * n..(t + 1) * n].iter().sum();
        if s <= 0.0 || !s.is_finite() {
            return Err(Error::Degenerate(format!("zero forward mass at step {t}")));
        }
        scales[t] = 1.0 / s;
        for j in 0..n {
            alpha_hat[t * n + j] *= scales[t];
        }
    }
    let log_likelihood: f64 = -scales.iter().map(|c| c.ln()).sum::<f64>();

    // Backward pass scaled by the same constants.
    let mut beta_hat = vec![0.0; t_len * n];
    for i in 0..n {
        beta_hat[(t_len - 1) * n + i] = scales[t_len - 1];
    }
    for t in (0..t_len - 1).rev() {
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += model.trans[i * n + j]
                    * model.emission(j, obs[t + 1])
                    * beta_hat[(t + 1) * n + j];
            }
            beta_hat[t * n + i] = acc * scales[t];
        }
    }

    // γ_t(i) = α̂_t(i)·β̂_t(i)/c_t ; ξ_t(i,j) = α̂_t(i)·a_ij·b_j(o_{t+1})·β̂_{t+1}(j)
    let mut gamma = vec![0.0; t_len * n];
    for t in 0..t_len {
        for i in 0..n {
            gamma[t * n + i] = alpha_hat[t * n + i] * beta_hat[t * n + i] / scales[t];
        }
    }
    let mut xi = vec![0.0; t_len.saturating_sub(1) * n * n];
    for t in 0..t_len.saturating_sub(1) {
        for i in 0..n {
            for j in 0..n {
                xi[(t * n + i) * n + j] = alpha_hat[t * n + i]
                    * model.trans[i * n + j]
                    * model.emission(j, obs[t + 1])
                    * beta_hat[(t + 1) * n + j];
            }
        }
    }

    Ok(ForwardBackwardResult {
        alpha_hat,
        beta_hat,
        scales,
        log_likelihood,
        gamma,
        xi,
        len: t_len,
        n_states: n,
    })
}

#[derive(Clone, Debug)]
pub enum InitSpec {
    /// Emission means at the (i+0.5)/n quantiles of the observations,
    /// variances at the sample variance, 0.9 self-transitions, uniform π.
    Quantiles,
    Custom(HmmModel),
}

#[derive(Clone, Debug)]
pub struct HmmFitOptions {
    pub init: InitSpec,
    /// Stop once the log-likelihood improves by less than this.
    pub tol: f64,
    pub max_iter: usize,
    /// Drives re-seeding of collapsed states.
    pub seed: u64,
}

impl Default for HmmFitOptions {
    fn default() -> Self {
        HmmFitOptions {
            init: InitSpec::Quantiles,
            tol: 1e-6,
            max_iter: 500,
            seed: 0,
        }
    }
}

/// One re-seeding event: a state whose expected occupancy vanished had its
/// emission re-centered on a random observation.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ReseedEvent {
    pub iteration: usize,
    pub state: usize,
}

#[derive(Clone, Debug)]
pub struct FitTrace {
    pub log_likelihood: Vec<f64>,
    pub reseeded: Vec<ReseedEvent>,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct HmmFit {
    pub model: HmmModel,
    pub trace: FitTrace,
}

fn quantile_init(obs: &[f64], n_states: usize) -> HmmModel {
    let mut sorted = obs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let t = obs.len() as f64;
    let mean = obs.iter().sum::<f64>() / t;
    let var = (obs.iter().map(|o| (o - mean).powi(2)).sum::<f64>() / t).max(VAR_FLOOR);
    let means: Vec<f64> = (0..n_states)
        .map(|i| {
            let q = (i as f64 + 0.5) / n_states as f64;
            let idx = ((q * (sorted.len() as f64 - 1.0)).round() as usize).min(sorted.len() - 1);
            sorted[idx]
        })
        .collect();
    let mut trans = vec![0.0; n_states * n_states];
    for i in 0..n_states {
        for j in 0..n_states {
            trans[i * n_states + j] = if n_states == 1 {
                1.0
            } else if i == j {
                0.9
            } else {
                0.1 / (n_states as f64 - 1.0)
            };
        }
    }
    HmmModel {
        n_states,
        pi: vec![1.0 / n_states as f64; n_states],
        trans,
        means,
        vars: vec![var; n_states],
    }
}

/// Expectation-maximization for the model parameters, iterating the scaled
/// forward–backward pass and the closed-form update equations until the
/// log-likelihood gain drops below `tol` or `max_iter` is reached.
pub fn hmm_baum_welch(obs: &[f64], n_states: usize, opts: &HmmFitOptions) -> Result<HmmFit> {
    if n_states == 0 {
        return Err(Error::Config("baum-welch: need at least one state".into()));
    }
    if obs.len() <= n_states {
        return Err(Error::Contract(format!(
            "baum-welch: {} observations cannot support {n_states} states",
            obs.len()
        )));
    }
    if opts.tol <= 0.0 {
        return Err(Error::Config("baum-welch: tol must be > 0".into()));
    }
    let mut model = match &opts.init {
        InitSpec::Quantiles => quantile_init(obs, n_states),
        InitSpec::Custom(m) => {
            if m.n_states != n_states {
                return Err(Error::Config(format!(
                    "baum-welch: custom init has {} states, wanted {n_states}",
                    m.n_states
                )));
            }
            m.validate()?;
            m.clone()
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let t_len = obs.len();
    let n = n_states;
    let sample_var = {
        let mean = obs.iter().sum::<f64>() / t_len as f64;
        (obs.iter().map(|o| (o - mean) * (o - mean)).sum::<f64>() / t_len as f64)
            .max(VAR_FLOOR)
    };

    let mut trace = FitTrace {
        log_likelihood: Vec::new(),
        reseeded: Vec::new(),
        converged: false,
    };
    let mut prev_ll = f64::NEG_INFINITY;
    for iter in 0..opts.max_iter {
        let fb = hmm_forward_backward(&model, obs)?;
        if !fb.log_likelihood.is_finite() {
            return Err(Error::Fitting(format!(
                "non-finite log-likelihood at iteration {iter}"
            )));
        }
        trace.log_likelihood.push(fb.log_likelihood);
        if fb.log_likelihood - prev_ll < opts.tol && iter > 0 {
            trace.converged = true;
            break;
        }
        prev_ll = fb.log_likelihood;

        // M-step.
        let mut occupancy = vec![0.0; n];
        for t in 0..t_len {
            for i in 0..n {
                occupancy[i] += fb.gamma[t * n + i];
            }
        }
        // π from the first-step occupancy.
        for i in 0..n {
            model.pi[i] = fb.gamma[i];
        }
        // Transitions: expected transition counts over expected visits,
        // both summed over t = 1..T−1.
        for i in 0..n {
            let mut visits = 0.0;
            for t in 0..t_len - 1 {
                visits += fb.gamma[t * n + i];
            }
            if visits > 0.0 {
                for j in 0..n {
                    let mut transitions = 0.0;
                    for t in 0..t_len - 1 {
                        transitions += fb.xi[(t * n + i) * n + j];
                    }
                    model.trans[i * n + j] = transitions / visits;
                }
            }
        }
        // Gaussian emission updates, with dead states re-seeded.
        for i in 0..n {
            if occupancy[i] < 1e-12 {
                let pick = rng.random_range(0..t_len);
                model.means[i] = obs[pick];
                model.vars[i] = sample_var;
                for j in 0..n {
                    model.trans[i * n + j] = 1.0 / n as f64;
                }
                trace.reseeded.push(ReseedEvent {
                    iteration: iter,
                    state: i,
                });
                continue;
            }
            let mut mean = 0.0;
            for t in 0..t_len {
                mean += fb.gamma[t * n + i] * obs[t];
            }
            mean /= occupancy[i];
            let mut var = 0.0;
            for t in 0..t_len {
                var += fb.gamma[t * n + i] * (obs[t] - mean) * (obs[t] - mean);
            }
            var /= occupancy[i];
            model.means[i] = mean;
            model.vars[i] = var.max(VAR_FLOOR);
        }
    }
    Ok(HmmFit { model, trace })
}

/// Generative direction: q₁ ~ π, transitions via A, Gaussian emissions.
pub fn hmm_sample(model: &HmmModel, length: usize, seed: u64) -> Result<Vec<f64>> {
    model.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = model.n_states;
    let mut out = Vec::with_capacity(length);
    if length == 0 {
        return Ok(out);
    }
    let pick = |weights: &[f64], rng: &mut ChaCha8Rng| -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, w) in weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return i;
            }
        }
        weights.len() - 1
    };
    let mut state = pick(&model.pi, &mut rng);
    for _ in 0..length {
        let dist = Normal::new(model.means[state], model.vars[state].sqrt())
            .map_err(|e| Error::Config(format!("emission sampling: {e}")))?;
        out.push(dist.sample(&mut rng));
        state = pick(&model.trans[state * n..(state + 1) * n], &mut rng);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateSelectionRow {
    pub states: usize,
    pub d_js: f64,
}

#[derive(Clone, Debug)]
pub struct StateSelection {
    pub table: Vec<StateSelectionRow>,
    pub selected: usize,
    pub models: Vec<HmmModel>,
}

/// Fit one model per candidate state count, sample a synthetic series of
/// the same length, and score it against the observations with the
/// Jensen–Shannon divergence; the lowest-divergence count wins.
pub fn hmm_state_selection(
    obs: &[f64],
    state_range: impl IntoIterator<Item = usize>,
    opts: &HmmFitOptions,
    bins: usize,
    hist_eps: f64,
) -> Result<StateSelection> {
    let mut table = Vec::new();
    let mut models = Vec::new();
    for count in state_range {
        let per_count = HmmFitOptions {
            init: opts.init.clone(),
            tol: opts.tol,
            max_iter: opts.max_iter,
            seed: opts.seed.wrapping_add(count as u64),
        };
        let fit = hmm_baum_welch(obs, count, &per_count)
            .map_err(|e| Error::Fitting(format!("{count} states: {e}")))?;
        let sample = hmm_sample(&fit.model, obs.len(), per_count.seed ^ 0x5eed)
            .map_err(|e| Error::Fitting(format!("{count} states: {e}")))?;
        let d_js = js_from_samples(obs, &sample, bins, hist_eps)
            .map_err(|e| Error::Fitting(format!("{count} states: {e}")))?;
        table.push(StateSelectionRow {
            states: count,
            d_js,
        });
        models.push(fit.model);
    }
    if table.is_empty() {
        return Err(Error::EmptyInput("state selection over an empty range".into()));
    }
    let selected = table
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.d_js.partial_cmp(&b.d_js).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    Ok(StateSelection {
        selected: table[selected].states,
        table,
        models,
    })
}

/// Default binning used when scoring HMM samples against data.
pub fn default_selection_binning() -> (usize, f64) {
    (DEFAULT_BINS, DEFAULT_HIST_EPS)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state_model() -> HmmModel {
        HmmModel {
            n_states: 2,
            pi: vec![0.6, 0.4],
            trans: vec![0.7, 0.3, 0.2, 0.8],
            means: vec![0.0, 3.0],
            vars: vec![1.0, 0.5],
        }
    }

    /// Joint-probability enumeration over all state sequences.
    fn enumerate_likelihood(model: &HmmModel, obs: &[f64]) -> f64 {
        let n = model.n_states;
        let t_len = obs.len();
        let mut total = 0.0;
        let mut seq = vec![0usize; t_len];
        loop {
            let mut p = model.pi[seq[0]] * gaussian_pdf(obs[0], model.means[seq[0]], model.vars[seq[0]]);
            for t in 1..t_len {
                p *= model.trans[seq[t - 1] * n + seq[t]]
                    * gaussian_pdf(obs[t], model.means[seq[t]], model.vars[seq[t]]);
            }
            total += p;
            // Odometer increment over state sequences.
            let mut pos = 0;
            loop {
                if pos == t_len {
                    return total;
                }
                seq[pos] += 1;
                if seq[pos] < n {
                    break;
                }
                seq[pos] = 0;
                pos += 1;
            }
        }
    }

    #[test]
    fn single_state_closed_form() {
        let model = HmmModel {
            n_states: 1,
            pi: vec![1.0],
            trans: vec![1.0],
            means: vec![0.5],
            vars: vec![2.0],
        };
        let obs = [0.1, 0.9, -0.4, 0.5];
        let fb = hmm_forward_backward(&model, &obs).unwrap();
        let want: f64 = obs.iter().map(|&o| gaussian_pdf(o, 0.5, 2.0).ln()).sum();
        assert!((fb.log_likelihood - want).abs() < 1e-12);
        for t in 0..obs.len() {
            assert!((fb.gamma_at(t)[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn scaled_likelihood_matches_enumeration() {
        let model = two_state_model();
        let obs = [0.3, 2.9, 3.1, -0.5, 0.0, 2.2, 3.3, 0.7];
        let fb = hmm_forward_backward(&model, &obs).unwrap();
        let want = enumerate_likelihood(&model, &obs);
        let got = fb.log_likelihood.exp();
        assert!((got - want).abs() / want < 1e-9, "{got} vs {want}");

        let model3 = HmmModel {
            n_states: 3,
            pi: vec![0.5, 0.3, 0.2],
            trans: vec![0.6, 0.3, 0.1, 0.25, 0.5, 0.25, 0.1, 0.2, 0.7],
            means: vec![-1.0, 0.5, 2.0],
            vars: vec![0.5, 1.0, 0.8],
        };
        let obs6 = [0.2, -0.9, 1.8, 0.4, 2.1, -1.2];
        let fb = hmm_forward_backward(&model3, &obs6).unwrap();
        let want = enumerate_likelihood(&model3, &obs6);
        let got = fb.log_likelihood.exp();
        assert!((got - want).abs() / want < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn normalization_identities() {
        let model = two_state_model();
        let obs: Vec<f64> = (0..40)
            .map(|i| if i % 5 == 0 { 3.0 } else { 0.1 * i as f64 % 1.0 })
            .collect();
        let fb = hmm_forward_backward(&model, &obs).unwrap();
        for t in 0..obs.len() {
            let s: f64 = fb.gamma_at(t).iter().sum();
            assert!((s - 1.0).abs() < 1e-10, "gamma sum at {t}: {s}");
        }
        let n = model.n_states;
        for t in 0..obs.len() - 1 {
            let xi = fb.xi_at(t);
            let s: f64 = xi.iter().sum();
            assert!((s - 1.0).abs() < 1e-10, "xi sum at {t}: {s}");
            // Row sums of ξ reproduce γ.
            for i in 0..n {
                let row: f64 = xi[i * n..(i + 1) * n].iter().sum();
                assert!((row - fb.gamma_at(t)[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn empty_observations_rejected() {
        assert!(matches!(
            hmm_forward_backward(&two_state_model(), &[]),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn invalid_model_rejected() {
        let mut bad = two_state_model();
        bad.trans[0] = 0.9; // row no longer sums to 1
        assert!(hmm_forward_backward(&bad, &[0.0, 1.0]).is_err());
        let mut bad = two_state_model();
        bad.vars[1] = 0.0;
        assert!(hmm_forward_backward(&bad, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn baum_welch_stationary_at_truth() {
        // Initialized at the generating model, one EM pass barely moves.
        let truth = two_state_model();
        let obs = hmm_sample(&truth, 3000, 11).unwrap();
        let opts = HmmFitOptions {
            init: InitSpec::Custom(truth.clone()),
            tol: 1e-9,
            max_iter: 2,
            seed: 0,
        };
        let fit = hmm_baum_welch(&obs, 2, &opts).unwrap();
        for (a, b) in fit.model.means.iter().zip(&truth.means) {
            assert!((a - b).abs() < 0.1, "means drifted: {a} vs {b}");
        }
        assert!(
            fit.trace.log_likelihood.windows(2).all(|w| w[1] >= w[0] - 1e-8),
            "log-likelihood decreased: {:?}",
            fit.trace.log_likelihood
        );
    }

    #[test]
    fn single_state_fit_matches_sample_statistics() {
        let obs: Vec<f64> = (0..500).map(|i| (i as f64 * 0.77).sin() * 2.0 + 1.0).collect();
        let opts = HmmFitOptions {
            max_iter: 1,
            ..Default::default()
        };
        let fit = hmm_baum_welch(&obs, 1, &opts).unwrap();
        let mean = obs.iter().sum::<f64>() / obs.len() as f64;
        let var = obs.iter().map(|o| (o - mean).powi(2)).sum::<f64>() / obs.len() as f64;
        assert!((fit.model.means[0] - mean).abs() < 1e-9);
        assert!((fit.model.vars[0] - var).abs() < 1e-9);
    }

    #[test]
    fn two_state_recovery() {
        let truth = HmmModel {
            n_states: 2,
            pi: vec![0.5, 0.5],
            trans: vec![0.95, 0.05, 0.05, 0.95],
            means: vec![0.0, 5.0],
            vars: vec![1.0, 1.0],
        };
        let obs = hmm_sample(&truth, 10_000, 21).unwrap();
        let fit = hmm_baum_welch(&obs, 2, &HmmFitOptions::default()).unwrap();
        let mut means = fit.model.means.clone();
        means.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(means[0].abs() < 0.5, "low mean {}", means[0]);
        assert!((means[1] - 5.0).abs() < 0.5, "high mean {}", means[1]);
    }

    #[test]
    fn sample_length_zero_is_empty() {
        assert!(hmm_sample(&two_state_model(), 0, 1).unwrap().is_empty());
    }

    #[test]
    fn single_state_sample_obeys_law_of_large_numbers() {
        let model = HmmModel {
            n_states: 1,
            pi: vec![1.0],
            trans: vec![1.0],
            means: vec![2.5],
            vars: vec![4.0],
        };
        let n = 40_000;
        let sample = hmm_sample(&model, n, 9).unwrap();
        let mean = sample.iter().sum::<f64>() / n as f64;
        let bound = 4.0 * 2.0 / (n as f64).sqrt();
        assert!((mean - 2.5).abs() < bound, "mean {mean}");
    }

    #[test]
    fn visit_frequencies_match_stationary_distribution() {
        let model = HmmModel {
            n_states: 2,
            pi: vec![0.5, 0.5],
            trans: vec![0.9, 0.1, 0.3, 0.7],
            means: vec![0.0, 10.0],
            vars: vec![0.01, 0.01],
        };
        // Stationary distribution by power iteration.
        let mut dist = [0.5, 0.5];
        for _ in 0..200 {
            dist = [
                dist[0] * 0.9 + dist[1] * 0.3,
                dist[0] * 0.1 + dist[1] * 0.7,
            ];
        }
        let n = 1_000_000;
        let sample = hmm_sample(&model, n, 33).unwrap();
        // Emissions are well separated, so the state is readable off the value.
        let high = sample.iter().filter(|&&v| v > 5.0).count() as f64 / n as f64;
        assert!((high - dist[1]).abs() < 0.02, "visits {high} vs {}", dist[1]);
    }

    #[test]
    fn state_selection_singleton_range() {
        let obs = hmm_sample(&two_state_model(), 400, 3).unwrap();
        let sel = hmm_state_selection(&obs, [3], &HmmFitOptions::default(), 50, 1e-10).unwrap();
        assert_eq!(sel.table.len(), 1);
        assert_eq!(sel.selected, 3);
    }
}
