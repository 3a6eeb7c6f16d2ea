use gazegen::data::{crw_generate, segment, CrwParams, Normalizer};
use gazegen::gan::{train_with, ArchKind, GanConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let epochs: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let noise: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(32);
    let lr: f64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(0.0002);

    let params = CrwParams {
        mu_log: 0.0,
        sigma_log: 0.5,
        kappa: 4.0,
        initial_heading: 0.0,
        steps: 2000 * 64 + 63,
    };
    let out = crw_generate(&params, 4242).unwrap();
    let norm = Normalizer::fit(&out.velocity.values).unwrap();
    let normalized = norm.normalize(&out.velocity.values);
    let dataset = segment(&normalized, 64, 64).unwrap();
    eprintln!("dataset: {} sequences of length 64", dataset.len());

    let config = GanConfig {
        generator: ArchKind::Lstm,
        discriminator: ArchKind::Cnn,
        sequence_length: 64,
        batch_size: 32,
        noise_dim: noise,
        learning_rate: lr,
        epochs,
        spectral_weight: 0.1,
        eval_count: 128,
        window_start: 1,
        seed: 7,
        ..Default::default()
    };
    let t0 = std::time::Instant::now();
    let out = train_with(&dataset, norm, &config, true, |r| {
        eprintln!(
            "epoch {:3}  l_g {:.4}  l_d {:.4}  l_spec {:.4}  d_js {:.5}  {:.2}s",
            r.epoch, r.l_g, r.l_d, r.l_spectral, r.d_js, r.seconds
        );
        Ok(())
    })
    .unwrap();
    eprintln!(
        "total {:.1}s for {} epochs ({:.2}s/epoch)",
        t0.elapsed().as_secs_f64(),
        out.history.len(),
        t0.elapsed().as_secs_f64() / out.history.len() as f64
    );
}
