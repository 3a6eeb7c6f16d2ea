//! ingest: recording CSV → raw velocity CSV(s) + normalized sequence
//! dataset + metadata sidecar.

use serde_json::json;

use crate::commands::args::IngestArgs;
use crate::commands::config::FileConfig;
use crate::commands::{default_out, ensure_out_dir, provenance, write_json, EXIT_OK};
use crate::data::io::{save_sequences, save_velocity_csv};
use crate::data::{compute_velocity, load_recording, segment, Normalizer, SourceTag};
use crate::error::{Error, Result};

pub fn run(args: IngestArgs) -> Result<i32> {
    let mut cfg = FileConfig::load(args.config.as_deref())?;
    let input = cfg.resolve_required("input", args.input)?;
    let out = cfg.resolve("out", args.out, default_out())?;
    let eye = cfg.resolve("eye", args.eye, "left".to_string())?;
    let length = cfg.resolve("length", args.length, 200usize)?;
    let stride = cfg.resolve("stride", args.stride, length)?;
    cfg.finish()?;

    let eyes: Vec<SourceTag> = match eye.as_str() {
        "left" => vec![SourceTag::Left],
        "right" => vec![SourceTag::Right],
        "both" => vec![SourceTag::Left, SourceTag::Right],
        other => {
            return Err(Error::Config(format!(
                "eye must be left, right, or both; got '{other}'"
            )))
        }
    };

    let recording = load_recording(&input)?;
    ensure_out_dir(&out)?;

    let mut velocities = Vec::new();
    for side in &eyes {
        let v = compute_velocity(recording.eye(*side), recording.sample_interval_ms)?;
        velocities.push((*side, v));
    }
    let pooled: Vec<f64> = velocities.iter().flat_map(|(_, v)| v.iter().copied()).collect();
    let normalizer = Normalizer::fit(&pooled)?;

    let mut outputs = Vec::new();
    let mut dataset = Vec::new();
    let mut velocity_counts = Vec::new();
    for (side, v) in &velocities {
        let name = match side {
            SourceTag::Left => "velocity_left.csv",
            SourceTag::Right => "velocity_right.csv",
            SourceTag::Synthetic => unreachable!(),
        };
        save_velocity_csv(out.join(name), v, recording.sample_interval_ms)?;
        outputs.push(name.to_string());
        velocity_counts.push(json!({"eye": side, "samples": v.len()}));
        let normalized = normalizer.normalize(v);
        dataset.extend(segment(&normalized, length, stride)?);
    }
    save_sequences(out.join("dataset.csv"), &dataset)?;
    outputs.push("dataset.csv".into());

    if dataset.is_empty() {
        eprintln!(
            "warning: velocity series shorter than one segment of {length}; dataset is empty"
        );
    }

    let meta = json!({
        "eye": eye,
        "normalizer": {"min": normalizer.min, "max": normalizer.max},
        "sample_interval_ms": recording.sample_interval_ms,
        "velocity_series": velocity_counts,
        "sequences": dataset.len(),
        "length": length,
        "stride": stride,
    });
    write_json(&out.join("ingest_meta.json"), &meta)?;
    outputs.push("ingest_meta.json".into());

    let config_json = json!({
        "input": input.display().to_string(),
        "eye": eye,
        "length": length,
        "stride": stride,
    });
    let output_refs: Vec<&str> = outputs.iter().map(String::as_str).collect();
    let prov = provenance("ingest", config_json, &output_refs);
    write_json(&out.join("provenance.json"), &prov)?;
    Ok(EXIT_OK)
}
