//! kde: velocity series → Silverman-bandwidth KDE Markov model summary and
//! a sampled synthetic series.

use serde_json::json;

use crate::commands::args::KdeArgs;
use crate::commands::config::FileConfig;
use crate::commands::{default_out, ensure_out_dir, provenance, write_json, EXIT_OK};
use crate::data::io::{load_velocity_csv, save_velocity_csv};
use crate::error::Result;
use crate::markov::kde::{kde_markov_sample, KdeMarkovModel};

pub fn run(args: KdeArgs) -> Result<i32> {
    let mut cfg = FileConfig::load(args.config.as_deref())?;
    let series_path: std::path::PathBuf = cfg.resolve_required("series", args.series)?;
    let out = cfg.resolve("out", args.out, default_out())?;
    let seed = cfg.resolve_required("seed", args.seed)?;
    let order = cfg.resolve("order", args.order, 1usize)?;
    let length = cfg.resolve_required("length", args.length)?;
    cfg.finish()?;

    let series = load_velocity_csv(&series_path)?;
    let model = KdeMarkovModel::fit(&series, order)?;
    // Continue the series: the conditioning history is its last k values.
    let initial_history = &series[series.len() - order..];
    let sample = kde_markov_sample(&model, length, seed, initial_history)?;

    ensure_out_dir(&out)?;
    save_velocity_csv(out.join("kde_sample.csv"), &sample.values, 1.0)?;

    let config_json = json!({
        "series": series_path.display().to_string(),
        "order": order,
        "length": length,
        "seed": seed,
    });
    let prov = provenance("kde", config_json, &["kde_summary.json", "kde_sample.csv"]);
    let summary = json!({
        "order": model.order,
        "bandwidth": model.bandwidth,
        "training_samples": model.data.len(),
        "sampled": sample.values.len(),
        "marginal_fallbacks": sample.marginal_fallbacks,
        "seed": seed,
        "provenance": serde_json::to_value(&prov)
            .map_err(|e| crate::error::Error::Contract(e.to_string()))?,
    });
    write_json(&out.join("kde_summary.json"), &summary)?;
    write_json(&out.join("provenance.json"), &prov)?;
    Ok(EXIT_OK)
}
