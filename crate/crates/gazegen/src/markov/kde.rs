//! k-th order KDE Markov model: the conditional next-value density is a
//! ratio of Gaussian-kernel density estimates over length-(k+1) and
//! length-k windows of the training series, with Silverman's bandwidth.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Marginal mass below this is treated as an unsupported history.
pub const SUPPORT_FLOOR: f64 = 1e-300;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

fn kernel(u: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * u * u).exp()
}

/// h = 1.06·σ̂·N^(−1/(k+4)) with the unbiased (N−1) standard deviation.
pub fn silverman_bandwidth(series: &[f64], order: usize) -> Result<f64> {
    let n = series.len();
    if n < 2 {
        return Err(Error::Contract(format!(
            "silverman bandwidth needs at least 2 samples, got {n}"
        )));
    }
    let nf = n as f64;
    let mean = series.iter().sum::<f64>() / nf;
    let sd = (series.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt();
    if sd == 0.0 {
        return Err(Error::Degenerate(
            "silverman bandwidth of a constant series".into(),
        ));
    }
    Ok(1.06 * sd * nf.powf(-1.0 / (order as f64 + 4.0)))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KdeMarkovModel {
    pub order: usize,
    pub bandwidth: f64,
    /// Retained training series.
    pub data: Vec<f64>,
}

impl KdeMarkovModel {
    /// Fit by retaining the series and computing the Silverman bandwidth.
    pub fn fit(series: &[f64], order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::Config("kde markov order must be >= 1".into()));
        }
        if series.len() <= order {
            return Err(Error::Contract(format!(
                "kde markov of order {order} needs more than {order} samples, got {}",
                series.len()
            )));
        }
        let bandwidth = silverman_bandwidth(series, order)?;
        Ok(KdeMarkovModel {
            order,
            bandwidth,
            data: series.to_vec(),
        })
    }

    pub fn with_bandwidth(series: &[f64], order: usize, bandwidth: f64) -> Result<Self> {
        if order == 0 || bandwidth <= 0.0 {
            return Err(Error::Config(
                "kde markov needs order >= 1 and bandwidth > 0".into(),
            ));
        }
        if series.len() <= order {
            return Err(Error::Contract("series shorter than the order".into()));
        }
        Ok(KdeMarkovModel {
            order,
            bandwidth,
            data: series.to_vec(),
        })
    }

    fn window_count(&self) -> usize {
        self.data.len() - self.order
    }

    /// Joint density f(X_n, X_{n−1}, …, X_{n−k}) at `point`, ordered most
    /// recent first: point[0] is the current value, point[j] lies j steps
    /// back.
    pub fn joint_density(&self, point: &[f64]) -> Result<f64> {
        let k = self.order;
        if point.len() != k + 1 {
            return Err(Error::Dimension(format!(
                "joint density point needs {} coordinates, got {}",
                k + 1,
                point.len()
            )));
        }
        let h = self.bandwidth;
        let mut acc = 0.0;
        for i in k..self.data.len() {
            let mut prod = 1.0;
            for (j, &p) in point.iter().enumerate() {
                prod *= kernel((p - self.data[i - j]) / h);
            }
            acc += prod;
        }
        Ok(acc / (self.window_count() as f64 * h.powi(k as i32 + 1)))
    }

    /// Marginal density of a length-k history, ordered most recent first.
    pub fn history_density(&self, history: &[f64]) -> Result<f64> {
        let k = self.order;
        if history.len() != k {
            return Err(Error::Dimension(format!(
                "history needs {k} coordinates, got {}",
                history.len()
            )));
        }
        let h = self.bandwidth;
        let mut acc = 0.0;
        for i in k..self.data.len() {
            let mut prod = 1.0;
            for (j, &p) in history.iter().enumerate() {
                prod *= kernel((p - self.data[i - 1 - j]) / h);
            }
            acc += prod;
        }
        Ok(acc / (self.window_count() as f64 * h.powi(k as i32)))
    }

    /// Conditional density P(X_n = x | history), the joint over the
    /// marginal. `history` is ordered most recent first.
    pub fn conditional_density(&self, history: &[f64], x: f64) -> Result<f64> {
        let marginal = self.history_density(history)?;
        if marginal < SUPPORT_FLOOR {
            return Err(Error::Degenerate(format!(
                "history lies outside the data support (marginal {marginal:e})"
            )));
        }
        let mut point = Vec::with_capacity(self.order + 1);
        point.push(x);
        point.extend_from_slice(history);
        Ok(self.joint_density(&point)? / marginal)
    }

    /// Kernel weights of each training window against a history (most
    /// recent first). The conditional density is exactly the w-weighted
    /// mixture of Normal(data[i], h²) components.
    fn conditional_weights(&self, history: &[f64]) -> Result<(Vec<f64>, f64)> {
        let k = self.order;
        if history.len() != k {
            return Err(Error::Dimension(format!(
                "history needs {k} coordinates, got {}",
                history.len()
            )));
        }
        let h = self.bandwidth;
        let mut weights = Vec::with_capacity(self.window_count());
        let mut total = 0.0;
        for i in k..self.data.len() {
            let mut w = 1.0;
            for (j, &p) in history.iter().enumerate() {
                w *= kernel((p - self.data[i - 1 - j]) / h);
            }
            weights.push(w);
            total += w;
        }
        Ok((weights, total))
    }

    /// One draw from the conditional given a history (most recent first):
    /// select a training window with probability proportional to its kernel
    /// weight, then sample Normal(window value, h²).
    pub fn conditional_sample(&self, history: &[f64], rng: &mut ChaCha8Rng) -> Result<f64> {
        let (weights, total) = self.conditional_weights(history)?;
        if total < SUPPORT_FLOOR {
            return Err(Error::Degenerate(
                "history lies outside the data support".into(),
            ));
        }
        let idx = pick_weighted(&weights, total, rng);
        let center = self.data[self.order + idx];
        let dist = Normal::new(center, self.bandwidth).expect("positive bandwidth");
        Ok(dist.sample(rng))
    }
}

fn pick_weighted(weights: &[f64], total: f64, rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}

#[derive(Clone, Debug)]
pub struct KdeSample {
    pub values: Vec<f64>,
    /// Steps where the rolling history fell outside the data support and
    /// the draw fell back to the marginal mixture.
    pub marginal_fallbacks: usize,
}

/// Iteratively extend `initial_history` (given in time order, latest last)
/// by `length` conditional draws. Deterministic per seed.
pub fn kde_markov_sample(
    model: &KdeMarkovModel,
    length: usize,
    seed: u64,
    initial_history: &[f64],
) -> Result<KdeSample> {
    let k = model.order;
    if initial_history.len() != k {
        return Err(Error::Contract(format!(
            "initial history must have length {k}, got {}",
            initial_history.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Most-recent-first working buffer.
    let mut history: Vec<f64> = initial_history.iter().rev().copied().collect();
    let mut values = Vec::with_capacity(length);
    let mut fallbacks = 0usize;
    for _ in 0..length {
        let (weights, total) = model.conditional_weights(&history)?;
        let idx = if total < SUPPORT_FLOOR {
            fallbacks += 1;
            rng.random_range(0..model.window_count())
        } else {
            pick_weighted(&weights, total, &mut rng)
        };
        let center = model.data[k + idx];
        let dist = Normal::new(center, model.bandwidth).expect("positive bandwidth");
        let x = dist.sample(&mut rng);
        values.push(x);
        history.rotate_right(1);
        history[0] = x;
    }
    Ok(KdeSample {
        values,
        marginal_fallbacks: fallbacks,
    })
}
