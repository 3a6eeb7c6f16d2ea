use std::time::Instant;
use gazegen::data::{crw_generate, segment, CrwParams, Normalizer};
use gazegen::gan::{ArchKind, Discriminator, Generator, discriminator_loss, generator_loss, combined_loss};
use gazegen::neural::{Mode, Tape, Tensor};
use gazegen::spectral::spectral_loss;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let params = CrwParams { mu_log: 0.0, sigma_log: 0.5, kappa: 4.0, initial_heading: 0.0, steps: 2000 * 64 + 63 };
    let out = crw_generate(&params, 4242).unwrap();
    let norm = Normalizer::fit(&out.velocity.values).unwrap();
    let normalized = norm.normalize(&out.velocity.values);
    let dataset = segment(&normalized, 64, 64).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut gen = Generator::new(ArchKind::Lstm, 64, 32, &mut rng).unwrap();
    let mut disc = Discriminator::new(ArchKind::Cnn, 64, &mut rng).unwrap();
    let batch = 32;
    let reps = 20;

    // G forward only (no grad)
    let t0 = Instant::now();
    for _ in 0..reps {
        let mut tape = Tape::new();
        let b = gen.bind(&mut tape, false);
        let noise = gen.sample_noise(batch, &mut rng);
        let _ = gen.forward(&mut tape, &b, noise, Mode::Train).unwrap();
    }
    println!("G fwd (no grad):      {:.1} ms", t0.elapsed().as_secs_f64() * 1000.0 / reps as f64);

    // G forward trainable + backward of mean
    let t0 = Instant::now();
    for _ in 0..reps {
        let mut tape = Tape::new();
        let b = gen.bind(&mut tape, true);
        let noise = gen.sample_noise(batch, &mut rng);
        let out = gen.forward(&mut tape, &b, noise, Mode::Train).unwrap();
        let flat = tape.reshape(out, &[batch * 64]).unwrap();
        let m = tape.mean_all(flat).unwrap();
        tape.backward(m).unwrap();
        let _ = b.gradients(&tape).unwrap();
    }
    println!("G fwd+bwd:            {:.1} ms", t0.elapsed().as_secs_f64() * 1000.0 / reps as f64);

    // D forward on real (no grad)
    let real: Vec<f64> = dataset[..batch].iter().flatten().copied().collect();
    let real_t = Tensor::from_vec(&[batch, 1, 64], real).unwrap();
    let t0 = Instant::now();
    for _ in 0..reps {
        let mut tape = Tape::new();
        let b = disc.bind(&mut tape, false);
        let x = tape.constant(real_t.clone());
        let _ = disc.forward(&mut tape, &b, x, Mode::Train).unwrap();
    }
    println!("D fwd (no grad):      {:.1} ms", t0.elapsed().as_secs_f64() * 1000.0 / reps as f64);

    // Full D step
    let t0 = Instant::now();
    for _ in 0..reps {
        let mut tape = Tape::new();
        let gb = gen.bind(&mut tape, false);
        let noise = gen.sample_noise(batch, &mut rng);
        let fake = gen.forward(&mut tape, &gb, noise, Mode::Train).unwrap();
        let x = tape.constant(real_t.clone());
        let db = disc.bind(&mut tape, true);
        let dr = disc.forward(&mut tape, &db, x, Mode::Train).unwrap();
        let df = disc.forward(&mut tape, &db, fake, Mode::Train).unwrap();
        let l = discriminator_loss(&mut tape, dr, df).unwrap();
        tape.backward(l).unwrap();
        let _ = db.gradients(&tape).unwrap();
    }
    println!("D step (fwd+bwd):     {:.1} ms", t0.elapsed().as_secs_f64() * 1000.0 / reps as f64);

    // Full G step
    let real_refs: Vec<&[f64]> = dataset[..batch].iter().map(|s| s.as_slice()).collect();
    let t0 = Instant::now();
    for _ in 0..reps {
        let mut tape = Tape::new();
        let gb = gen.bind(&mut tape, true);
        let noise = gen.sample_noise(batch, &mut rng);
        let fake = gen.forward(&mut tape, &gb, noise, Mode::Train).unwrap();
        let db = disc.bind(&mut tape, false);
        let df = disc.forward(&mut tape, &db, fake, Mode::Train).unwrap();
        let lg = generator_loss(&mut tape, df).unwrap();
        let ls = spectral_loss(&mut tape, &real_refs, fake, 1e-8).unwrap();
        let lf = combined_loss(&mut tape, lg, ls, 0.1).unwrap();
        tape.backward(lf).unwrap();
        let _ = gb.gradients(&tape).unwrap();
    }
    println!("G step (fwd+bwd):     {:.1} ms", t0.elapsed().as_secs_f64() * 1000.0 / reps as f64);

    // Eval sample
    let t0 = Instant::now();
    for _ in 0..reps {
        let mut tape = Tape::new();
        let b = gen.bind(&mut tape, false);
        let noise = gen.sample_noise(128, &mut rng);
        let _ = gen.forward(&mut tape, &b, noise, Mode::Eval).unwrap();
    }
    println!("eval G fwd (128):     {:.1} ms", t0.elapsed().as_secs_f64() * 1000.0 / reps as f64);
}
