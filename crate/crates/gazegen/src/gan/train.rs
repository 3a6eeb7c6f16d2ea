//! Adversarial training loop with per-epoch divergence evaluation, plus
//! sequence generation from a trained model.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Normalizer;
use crate::error::{Error, Result};
use crate::gan::builders::{Discriminator, Generator};
use crate::gan::losses::{combined_loss, discriminator_loss, generator_loss};
use crate::gan::{GanConfig, GanModel};
use crate::metrics::histogram::{js_from_samples, DEFAULT_BINS, DEFAULT_HIST_EPS};
use crate::neural::layers::Mode;
use crate::neural::tape::Tape;
use crate::neural::tensor::Tensor;
use crate::neural::{Adam, AdamConfig};
use crate::spectral::spectral_loss;

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct EpochRecord {
    /// 1-based epoch index.
    pub epoch: usize,
    pub l_g: f64,
    pub l_d: f64,
    pub l_spectral: f64,
    pub l_final: f64,
    /// Divergence between freshly generated sequences and the training pool.
    pub d_js: f64,
    /// Wall-clock seconds spent in the epoch (0 when timing is suppressed).
    pub seconds: f64,
}

pub type TrainingHistory = Vec<EpochRecord>;

pub struct TrainOutput {
    pub model: GanModel,
    pub history: TrainingHistory,
}

fn validate_dataset(dataset: &[Vec<f64>], config: &GanConfig) -> Result<()> {
    if dataset.is_empty() {
        return Err(Error::EmptyInput("training dataset is empty".into()));
    }
    for (i, seq) in dataset.iter().enumerate() {
        if seq.len() != config.sequence_length {
            return Err(Error::Dimension(format!(
                "sequence {i} has length {}, config wants {}",
                seq.len(),
                config.sequence_length
            )));
        }
        if !seq.iter().all(|v| v.is_finite() && (0.0..=1.0).contains(v)) {
            return Err(Error::Contract(format!(
                "sequence {i} has values outside [0, 1]; train on normalized data"
            )));
        }
    }
    if dataset.len() < config.batch_size {
        return Err(Error::Contract(format!(
            "dataset of {} sequences cannot fill one batch of {}",
            dataset.len(),
            config.batch_size
        )));
    }
    Ok(())
}

pub fn train(
    dataset: &[Vec<f64>],
    normalizer: Normalizer,
    config: &GanConfig,
) -> Result<TrainOutput> {
    train_with(dataset, normalizer, config, true, |_| Ok(()))
}

/// Training loop with an epoch callback (used to stream history rows to
/// disk as they complete). `measure_time` false writes zero seconds into
/// the records, making reruns byte-identical.
pub fn train_with<F>(
    dataset: &[Vec<f64>],
    normalizer: Normalizer,
    config: &GanConfig,
    measure_time: bool,
    mut on_epoch: F,
) -> Result<TrainOutput>
where
    F: FnMut(&EpochRecord) -> Result<()>,
{
    config.validate()?;
    validate_dataset(dataset, config)?;

    let mut master = ChaCha8Rng::seed_from_u64(config.seed);
    let mut gen_rng = ChaCha8Rng::seed_from_u64(master.random());
    let mut disc_rng = ChaCha8Rng::seed_from_u64(master.random());
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(master.random());
    let mut noise_rng = ChaCha8Rng::seed_from_u64(master.random());
    let mut eval_rng = ChaCha8Rng::seed_from_u64(master.random());

    let mut generator = Generator::new(
        config.generator,
        config.sequence_length,
        config.noise_dim,
        &mut gen_rng,
    )?;
    let mut discriminator =
        Discriminator::new(config.discriminator, config.sequence_length, &mut disc_rng)?;

    let adam_cfg = AdamConfig {
        learning_rate: config.learning_rate,
        beta1: config.beta1,
        beta2: config.beta2,
        epsilon: 1e-8,
    };
    let mut adam_g = Adam::new(adam_cfg);
    let mut adam_d = Adam::new(adam_cfg);

    let train_pool: Vec<f64> = dataset.iter().flatten().copied().collect();
    let batch = config.batch_size;
    let len = config.sequence_length;
    let mut indices: Vec<usize> = (0..dataset.len()).collect();
    let mut history = TrainingHistory::with_capacity(config.epochs);

    for epoch in 1..=config.epochs {
        let start = Instant::now();
        use rand::seq::SliceRandom;
        indices.shuffle(&mut shuffle_rng);

        let mut sums = [0.0_f64; 4]; // l_g, l_d, l_spectral, l_final
        let mut batches = 0usize;
        for chunk in indices.chunks_exact(batch) {
            let mut real_flat = Vec::with_capacity(batch * len);
            for &i in chunk {
                real_flat.extend_from_slice(&dataset[i]);
            }
            let real_tensor = Tensor::from_vec(&[batch, 1, len], real_flat)?;
            let real_refs: Vec<&[f64]> = chunk.iter().map(|&i| dataset[i].as_slice()).collect();

            // Discriminator step: fresh fakes as constants, gradients flow
            // only into discriminator parameters.
            let l_d_val = {
                let mut tape = Tape::new();
                let g_bound = generator.bind(&mut tape, false);
                let noise = generator.sample_noise(batch, &mut noise_rng);
                let fake = generator.forward(&mut tape, &g_bound, noise, Mode::Train)?;
                let real = tape.constant(real_tensor.clone());
                let d_bound = discriminator.bind(&mut tape, true);
                let d_real = discriminator.forward(&mut tape, &d_bound, real, Mode::Train)?;
                let d_fake = discriminator.forward(&mut tape, &d_bound, fake, Mode::Train)?;
                let l_d = discriminator_loss(&mut tape, d_real, d_fake)?;
                let value = tape.scalar_value(l_d);
                if !value.is_finite() {
                    return Err(Error::Training(format!(
                        "non-finite discriminator loss at epoch {epoch}, batch {batches}"
                    )));
                }
                tape.backward(l_d)?;
                let grads = d_bound.gradients(&tape)?;
                adam_d.step(&mut discriminator.params, &grads)?;
                value
            };

            // Generator step on a fresh minibatch of latents; the spectral
            // term compares the real minibatch with the new fakes.
            let (l_g_val, l_s_val, l_f_val) = {
                let mut tape = Tape::new();
                let g_bound = generator.bind(&mut tape, true);
                let noise = generator.sample_noise(batch, &mut noise_rng);
                let fake = generator.forward(&mut tape, &g_bound, noise, Mode::Train)?;
                let d_bound = discriminator.bind(&mut tape, false);
                let d_fake = discriminator.forward(&mut tape, &d_bound, fake, Mode::Train)?;
                let l_g = generator_loss(&mut tape, d_fake)?;
                let l_s = spectral_loss(&mut tape, &real_refs, fake, config.spectral_eps)?;
                let l_f = combined_loss(&mut tape, l_g, l_s, config.spectral_weight)?;
                let (gv, sv, fv) = (
                    tape.scalar_value(l_g),
                    tape.scalar_value(l_s),
                    tape.scalar_value(l_f),
                );
                if !gv.is_finite() || !sv.is_finite() {
                    return Err(Error::Training(format!(
                        "non-finite generator objective at epoch {epoch}, batch {batches}"
                    )));
                }
                tape.backward(l_f)?;
                let grads = g_bound.gradients(&tape)?;
                adam_g.step(&mut generator.params, &grads)?;
                (gv, sv, fv)
            };

            sums[0] += l_g_val;
            sums[1] += l_d_val;
            sums[2] += l_s_val;
            sums[3] += l_f_val;
            batches += 1;
        }
        if batches == 0 {
            return Err(Error::Contract("no full minibatch per epoch".into()));
        }

        // Per-epoch fidelity: fresh eval-mode samples against the pool.
        let eval_values = {
            let mut tape = Tape::new();
            let g_bound = generator.bind(&mut tape, false);
            let noise = generator.sample_noise(config.eval_count, &mut eval_rng);
            let out = generator.forward(&mut tape, &g_bound, noise, Mode::Eval)?;
            tape.values(out).to_vec()
        };
        let d_js = js_from_samples(&train_pool, &eval_values, DEFAULT_BINS, DEFAULT_HIST_EPS)?;

        let n = batches as f64;
        let record = EpochRecord {
            epoch,
            l_g: sums[0] / n,
            l_d: sums[1] / n,
            l_spectral: sums[2] / n,
            l_final: sums[3] / n,
            d_js,
            seconds: if measure_time {
                start.elapsed().as_secs_f64()
            } else {
                0.0
            },
        };
        on_epoch(&record)?;
        history.push(record);
    }

    let model = GanModel {
        generator_kind: config.generator,
        discriminator_kind: config.discriminator,
        sequence_length: config.sequence_length,
        noise_dim: config.noise_dim,
        gen_params: generator.params,
        disc_params: discriminator.params,
        gen_state: generator.state,
        disc_state: discriminator.state,
        normalizer,
        seed: config.seed,
    };
    Ok(TrainOutput { model, history })
}

/// Sample `count` sequences in eval mode and map them back to original
/// velocity units through the stored normalizer.
pub fn generate(model: &GanModel, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let mut generator = Generator::from_parts(
        model.generator_kind,
        model.sequence_length,
        model.noise_dim,
        model.gen_params.clone(),
        model.gen_state.clone(),
    )?;
    if !(model.normalizer.min < model.normalizer.max) {
        return Err(Error::Contract(
            "model normalizer has an empty range".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let len = model.sequence_length;
    let mut remaining = count;
    while remaining > 0 {
        let chunk = remaining.min(64);
        let mut tape = Tape::new();
        let bound = generator.bind(&mut tape, false);
        let noise = generator.sample_noise(chunk, &mut rng);
        let node = generator.forward(&mut tape, &bound, noise, Mode::Eval)?;
        let values = tape.values(node);
        for b in 0..chunk {
            out.push(model.normalizer.denormalize(&values[b * len..(b + 1) * len]));
        }
        remaining -= chunk;
    }
    Ok(out)
}
