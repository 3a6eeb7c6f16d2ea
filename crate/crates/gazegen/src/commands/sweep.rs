//! sweep: train all four pairings, write per-pairing histories and the
//! ranked report. Exits with the partial code when a pairing failed.

use std::io::Write;

use crate::commands::args::SweepArgs;
use crate::commands::config::FileConfig;
use crate::commands::train::{history_row, open_history, resolve_common, TrainLikeArgs};
use crate::commands::{ensure_out_dir, provenance, write_json, EXIT_OK, EXIT_PARTIAL};
use crate::commands::train::load_normalizer;
use crate::data::io::load_sequences;
use crate::error::{Error, Result};
use crate::gan::sweep::{architecture_sweep, SweepRanking};

fn parse_ranking(s: &str) -> Result<SweepRanking> {
    match s {
        "normalized-product" => Ok(SweepRanking::NormalizedProduct),
        "spectral-integral" => Ok(SweepRanking::SpectralIntegral),
        "djs-integral" => Ok(SweepRanking::DjsIntegral),
        "mean-epoch-seconds" => Ok(SweepRanking::MeanEpochSeconds),
        other => Err(Error::Config(format!(
            "unknown ranking '{other}' (expected normalized-product, \
             spectral-integral, djs-integral, or mean-epoch-seconds)"
        ))),
    }
}

pub fn run(args: SweepArgs) -> Result<i32> {
    let mut cfg = FileConfig::load(args.config.as_deref())?;
    let like = TrainLikeArgs {
        generator: None,
        discriminator: None,
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
    let mut resolved = resolve_common(
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
    let ranking = parse_ranking(&cfg.resolve("ranking", args.ranking, "normalized-product".into())?)?;
    cfg.finish()?;

    let dataset = dataset_cache.expect("loaded during resolution");
    let normalizer = load_normalizer(resolved.meta.as_deref())?;
    ensure_out_dir(&resolved.out)?;

    resolved
        .config_json
        .as_object_mut()
        .expect("config object")
        .insert(
            "ranking".into(),
            serde_json::to_value(ranking).expect("ranking serializes"),
        );
    // The architecture pair in the shared config block is per-pairing here.
    let report = architecture_sweep(
        &dataset,
        normalizer,
        &resolved.gan,
        ranking,
        resolved.measure_time,
    )?;

    let mut outputs = vec!["sweep.json".to_string()];
    for entry in &report.entries {
        let name = format!("history_{}.csv", entry.name);
        let path = resolved.out.join(&name);
        let mut file = open_history(&path)?;
        for record in &entry.history {
            writeln!(file, "{}", history_row(record))
                .map_err(|e| Error::io(path.display().to_string(), e))?;
        }
        outputs.push(name);
    }

    let output_refs: Vec<&str> = outputs.iter().map(String::as_str).collect();
    let prov = provenance("sweep", resolved.config_json.clone(), &output_refs);
    let mut doc = serde_json::to_value(&report)
        .map_err(|e| Error::Contract(format!("sweep serialization: {e}")))?;
    doc.as_object_mut().expect("sweep report is an object").insert(
        "provenance".into(),
        serde_json::to_value(&prov).map_err(|e| Error::Contract(e.to_string()))?,
    );
    write_json(&resolved.out.join("sweep.json"), &doc)?;
    write_json(&resolved.out.join("provenance.json"), &prov)?;

    if report.partial {
        eprintln!(
            "warning: {} pairing(s) failed; report marked partial",
            report.failures.len()
        );
        Ok(EXIT_PARTIAL)
    } else {
        Ok(EXIT_OK)
    }
}
