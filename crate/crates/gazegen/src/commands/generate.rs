//! generate: trained model JSON → synthetic sequences CSV in original units.

use serde_json::json;

use crate::commands::args::GenerateArgs;
use crate::commands::config::FileConfig;
use crate::commands::{
    default_out, ensure_out_dir, provenance, read_checksummed, write_json, EXIT_OK,
};
use crate::data::io::save_sequences;
use crate::error::{Error, Result};
use crate::gan::{generate, GanModel};

pub fn run(args: GenerateArgs) -> Result<i32> {
    let mut cfg = FileConfig::load(args.config.as_deref())?;
    let model_path: std::path::PathBuf = cfg.resolve_required("model", args.model)?;
    let out = cfg.resolve("out", args.out, default_out())?;
    let count = cfg.resolve_required("count", args.count)?;
    let seed = cfg.resolve_required("seed", args.seed)?;
    cfg.finish()?;

    let payload = read_checksummed(&model_path)?;
    let model: GanModel = serde_json::from_value(payload).map_err(|e| {
        Error::Integrity(format!(
            "{}: not a valid model: {e}",
            model_path.display()
        ))
    })?;

    ensure_out_dir(&out)?;
    let sequences = if count == 0 {
        Vec::new()
    } else {
        generate(&model, count, seed)?
    };
    save_sequences(out.join("generated.csv"), &sequences)?;

    let config_json = json!({
        "model": model_path.display().to_string(),
        "count": count,
        "seed": seed,
        "sequence_length": model.sequence_length,
        "generator": model.generator_kind,
    });
    let prov = provenance("generate", config_json, &["generated.csv"]);
    write_json(&out.join("provenance.json"), &prov)?;
    Ok(EXIT_OK)
}
