//! hmm: velocity series (or flattened dataset) → fitted model JSON, plus a
//! state-count selection table when a range is given.

use serde_json::json;

use crate::commands::args::HmmArgs;
use crate::commands::config::FileConfig;
use crate::commands::{
    default_out, ensure_out_dir, parse_range, provenance, write_checksummed, write_json, EXIT_OK,
};
use crate::data::io::{atomic_write, load_sequences, load_velocity_csv};
use crate::error::{Error, Result};
use crate::markov::hmm::{
    hmm_baum_welch, hmm_state_selection, HmmFitOptions, HmmModel, InitSpec,
};
use crate::metrics::histogram::DEFAULT_HIST_EPS;

fn model_json(model: &HmmModel) -> serde_json::Value {
    json!({
        "n_states": model.n_states,
        "pi": model.pi,
        "trans": model.trans,
        "means": model.means,
        "vars": model.vars,
    })
}

pub fn run(args: HmmArgs) -> Result<i32> {
    let mut cfg = FileConfig::load(args.config.as_deref())?;
    let series_path = cfg.resolve_optional::<std::path::PathBuf>("series", args.series)?;
    let dataset_path = cfg.resolve_optional::<std::path::PathBuf>("dataset", args.dataset)?;
    let out = cfg.resolve("out", args.out, default_out())?;
    let seed = cfg.resolve_required("seed", args.seed)?;
    let states = cfg.resolve_optional("states", args.states)?;
    let state_range = cfg.resolve_optional::<String>("state-range", args.state_range)?;
    let tol = cfg.resolve("tol", args.tol, 1e-6)?;
    let max_iter = cfg.resolve("max-iter", args.max_iter, 500usize)?;
    let bins = cfg.resolve("bins", args.bins, crate::metrics::histogram::DEFAULT_BINS)?;
    cfg.finish()?;

    let (obs, input_desc) = match (&series_path, &dataset_path) {
        (Some(p), None) => (load_velocity_csv(p)?, p.display().to_string()),
        (None, Some(p)) => {
            let rows = load_sequences(p)?;
            let flat: Vec<f64> = rows.into_iter().flatten().collect();
            if flat.is_empty() {
                return Err(Error::EmptyInput(format!("{}: empty dataset", p.display())));
            }
            (flat, p.display().to_string())
        }
        _ => {
            return Err(Error::Config(
                "exactly one of --series or --dataset is required".into(),
            ))
        }
    };

    let opts = HmmFitOptions {
        init: InitSpec::Quantiles,
        tol,
        max_iter,
        seed,
    };
    ensure_out_dir(&out)?;

    let config_json = json!({
        "input": input_desc,
        "states": states,
        "state_range": state_range,
        "tol": tol,
        "max_iter": max_iter,
        "bins": bins,
        "seed": seed,
    });

    match (states, state_range) {
        (Some(n), None) => {
            let fit = hmm_baum_welch(&obs, n, &opts)
                .map_err(|e| Error::Fitting(format!("{n} states: {e}")))?;
            let prov = provenance("hmm", config_json, &["hmm_model.json"]);
            let payload = json!({
                "model": model_json(&fit.model),
                "fit": {
                    "iterations": fit.trace.log_likelihood.len(),
                    "converged": fit.trace.converged,
                    "final_log_likelihood": fit.trace.log_likelihood.last(),
                    "reseeded_states": fit.trace.reseeded,
                },
            });
            write_checksummed(&out.join("hmm_model.json"), payload, &prov)?;
            write_json(&out.join("provenance.json"), &prov)?;
        }
        (None, Some(range)) => {
            let (lo, hi) = parse_range(&range)?;
            let selection = hmm_state_selection(&obs, lo..=hi, &opts, bins, DEFAULT_HIST_EPS)?;
            let mut table = String::from("states,d_js\n");
            for row in &selection.table {
                table.push_str(&format!("{},{}\n", row.states, row.d_js));
            }
            atomic_write(out.join("selection.csv"), table.as_bytes())?;
            let prov = provenance("hmm", config_json, &["hmm_model.json", "selection.csv"]);
            let best = selection
                .table
                .iter()
                .position(|r| r.states == selection.selected)
                .expect("selected row exists");
            let payload = json!({
                "model": model_json(&selection.models[best]),
                "selection": {
                    "selected": selection.selected,
                    "table": selection.table,
                },
            });
            write_checksummed(&out.join("hmm_model.json"), payload, &prov)?;
            write_json(&out.join("provenance.json"), &prov)?;
        }
        _ => {
            return Err(Error::Config(
                "exactly one of --states or --state-range is required".into(),
            ))
        }
    }
    Ok(EXIT_OK)
}
