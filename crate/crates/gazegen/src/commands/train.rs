//! train: sequence dataset → trained model JSON + per-epoch history CSV.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::commands::args::TrainArgs;
use crate::commands::config::FileConfig;
use crate::commands::{
    default_out, ensure_out_dir, parse_timing, provenance, write_checksummed, write_json,
    Provenance, EXIT_OK,
};
use crate::data::io::load_sequences;
use crate::data::Normalizer;
use crate::error::{Error, Result};
use crate::gan::{train_with, ArchKind, EpochRecord, GanConfig};

pub const HISTORY_HEADER: &str = "epoch,l_g,l_d,l_spectral,l_final,d_js,seconds";

pub(crate) fn history_row(r: &EpochRecord) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        r.epoch, r.l_g, r.l_d, r.l_spectral, r.l_final, r.d_js, r.seconds
    )
}

/// Normalizer from an ingest metadata sidecar; identity over [0, 1] when no
/// sidecar is given (the dataset is already normalized).
pub(crate) fn load_normalizer(meta: Option<&Path>) -> Result<Normalizer> {
    match meta {
        None => Ok(Normalizer { min: 0.0, max: 1.0 }),
        Some(path) => {
            let path_str = path.display().to_string();
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(&path_str, e))?;
            let value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| Error::parse(&path_str, e.line(), e.to_string()))?;
            let norm = value
                .get("normalizer")
                .ok_or_else(|| Error::Config(format!("{path_str}: missing 'normalizer'")))?;
            let min = norm.get("min").and_then(|v| v.as_f64());
            let max = norm.get("max").and_then(|v| v.as_f64());
            match (min, max) {
                (Some(min), Some(max)) if min < max => Ok(Normalizer { min, max }),
                _ => Err(Error::Config(format!(
                    "{path_str}: normalizer must carry min < max"
                ))),
            }
        }
    }
}

pub(crate) struct ResolvedTrain {
    pub meta: Option<PathBuf>,
    pub out: PathBuf,
    pub gan: GanConfig,
    pub measure_time: bool,
    pub config_json: serde_json::Value,
}

pub(crate) fn resolve_common(
    cfg: &mut FileConfig,
    dataset: Option<PathBuf>,
    meta: Option<PathBuf>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    args: TrainLikeArgs,
    dataset_width: impl FnOnce(&Path) -> Result<usize>,
) -> Result<ResolvedTrain> {
    let dataset_path: PathBuf = cfg.resolve_required("dataset", dataset)?;
    let meta = cfg.resolve_optional("meta", meta)?;
    let out = cfg.resolve("out", out, default_out())?;
    let seed = cfg.resolve_required("seed", seed)?;
    let generator = ArchKind::parse(&cfg.resolve("generator", args.generator, "lstm".into())?)?;
    let discriminator =
        ArchKind::parse(&cfg.resolve("discriminator", args.discriminator, "cnn".into())?)?;
    let width = dataset_width(&dataset_path)?;
    let sequence_length = cfg.resolve("sequence-length", args.sequence_length, width)?;
    if sequence_length != width {
        return Err(Error::Config(format!(
            "sequence length {sequence_length} does not match dataset row width {width}"
        )));
    }
    let defaults = GanConfig::default();
    let gan = GanConfig {
        generator,
        discriminator,
        sequence_length,
        batch_size: cfg.resolve("batch-size", args.batch_size, defaults.batch_size)?,
        learning_rate: cfg.resolve("learning-rate", args.learning_rate, defaults.learning_rate)?,
        beta1: cfg.resolve("beta1", args.beta1, defaults.beta1)?,
        beta2: cfg.resolve("beta2", args.beta2, defaults.beta2)?,
        noise_dim: cfg.resolve("noise-dim", args.noise_dim, defaults.noise_dim)?,
        epochs: cfg.resolve("epochs", args.epochs, defaults.epochs)?,
        spectral_weight: cfg.resolve("lambda", args.lambda, defaults.spectral_weight)?,
        spectral_eps: cfg.resolve("eps-spec", args.eps_spec, defaults.spectral_eps)?,
        seed,
        eval_count: cfg.resolve("eval-count", args.eval_count, defaults.eval_count)?,
        window_start: cfg.resolve("window-start", args.window_start, defaults.window_start)?,
    };
    let measure_time = parse_timing(&cfg.resolve("timing", args.timing, "real".into())?)?;
    let config_json = json!({
        "dataset": dataset_path.display().to_string(),
        "meta": meta.as_ref().map(|p| p.display().to_string()),
        "generator": gan.generator,
        "discriminator": gan.discriminator,
        "sequence_length": gan.sequence_length,
        "batch_size": gan.batch_size,
        "learning_rate": gan.learning_rate,
        "beta1": gan.beta1,
        "beta2": gan.beta2,
        "noise_dim": gan.noise_dim,
        "epochs": gan.epochs,
        "lambda": gan.spectral_weight,
        "eps_spec": gan.spectral_eps,
        "seed": gan.seed,
        "eval_count": gan.eval_count,
        "window_start": gan.window_start,
        "timing": if measure_time { "real" } else { "none" },
    });
    Ok(ResolvedTrain {
        meta,
        out,
        gan,
        measure_time,
        config_json,
    })
}

/// The GAN hyperparameter flags shared between train and sweep.
pub(crate) struct TrainLikeArgs {
    pub generator: Option<String>,
    pub discriminator: Option<String>,
    pub sequence_length: Option<usize>,
    pub batch_size: Option<usize>,
    pub learning_rate: Option<f64>,
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
    pub noise_dim: Option<usize>,
    pub epochs: Option<usize>,
    pub lambda: Option<f64>,
    pub eps_spec: Option<f64>,
    pub eval_count: Option<usize>,
    pub window_start: Option<usize>,
    pub timing: Option<String>,
}

pub(crate) fn open_history(path: &Path) -> Result<std::fs::File> {
    let path_str = path.display().to_string();
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(&path_str, e))?;
    writeln!(file, "{HISTORY_HEADER}").map_err(|e| Error::io(&path_str, e))?;
    Ok(file)
}

pub fn run(args: TrainArgs) -> Result<i32> {
    let mut cfg = FileConfig::load(args.config.as_deref())?;
    let like = TrainLikeArgs {
        generator: args.generator,
        discriminator: args.discriminator,
        sequence_length: args.sequence_length,
        batch_size: args.batch_size,
        learning_rate: args.learning_rate,
        beta1: args.beta1,
        beta2: args.beta2,
        noise_dim: args.noise_dim,
        epochs: args.epochs,
        lambda: args.lambda,
        eps_spec: args.eps_spec,
        eval_count: args.eval_count,
        window_start: args.window_start,
        timing: args.timing,
    };
    let mut dataset_cache: Option<Vec<Vec<f64>>> = None;
    let resolved = resolve_common(
        &mut cfg,
        args.dataset,
        args.meta,
        args.out,
        args.seed,
        like,
        |path| {
            let rows = load_sequences(path)?;
            if rows.is_empty() {
                return Err(Error::EmptyInput(format!(
                    "{}: dataset has no sequences",
                    path.display()
                )));
            }
            let width = rows[0].len();
            dataset_cache = Some(rows);
            Ok(width)
        },
    )?;
    cfg.finish()?;
    resolved.gan.validate()?;

    let dataset = dataset_cache.expect("loaded during resolution");
    let normalizer = load_normalizer(resolved.meta.as_deref())?;
    ensure_out_dir(&resolved.out)?;

    let prov: Provenance = provenance(
        "train",
        resolved.config_json.clone(),
        &["model.json", "history.csv"],
    );
    write_json(&resolved.out.join("provenance.json"), &prov)?;

    // History rows stream to disk as epochs complete, so an aborted run
    // still leaves the finished prefix behind.
    let history_path = resolved.out.join("history.csv");
    let mut history_file = open_history(&history_path)?;
    let outcome = train_with(
        &dataset,
        normalizer,
        &resolved.gan,
        resolved.measure_time,
        |record| {
            let path_str = history_path.display().to_string();
            writeln!(history_file, "{}", history_row(record))
                .map_err(|e| Error::io(&path_str, e))?;
            history_file.flush().map_err(|e| Error::io(&path_str, e))?;
            Ok(())
        },
    )?;

    let model_value = serde_json::to_value(&outcome.model)
        .map_err(|e| Error::Contract(format!("model serialization: {e}")))?;
    write_checksummed(&resolved.out.join("model.json"), model_value, &prov)?;
    Ok(EXIT_OK)
}
