//! evaluate: real vs synthetic datasets → fidelity report JSON and
//! optional SVG plots.

use serde_json::json;

use crate::commands::args::EvaluateArgs;
use crate::commands::config::FileConfig;
use crate::commands::{default_out, ensure_out_dir, provenance, write_json, EXIT_OK};
use crate::data::io::{atomic_write, load_sequences};
use crate::error::{Error, Result};
use crate::metrics::histogram::histogram;
use crate::metrics::report::{evaluation_report, ReportSettings};
use crate::plot::{line_chart, Series};

pub fn run(args: EvaluateArgs) -> Result<i32> {
    let mut cfg = FileConfig::load(args.config.as_deref())?;
    let real_path: std::path::PathBuf = cfg.resolve_required("real", args.real)?;
    let synth_path: std::path::PathBuf = cfg.resolve_required("synthetic", args.synthetic)?;
    let out = cfg.resolve("out", args.out, default_out())?;
    let defaults = ReportSettings::default();
    let bins = cfg.resolve("bins", args.bins, defaults.bins)?;
    let max_lag = cfg.resolve("max-lag", args.max_lag, defaults.acf_max_lag)?;
    let plots = cfg.resolve("plots", args.plots.then_some(true), false)?;
    cfg.finish()?;

    let real = load_sequences(&real_path)?;
    let synthetic = load_sequences(&synth_path)?;
    if real.is_empty() || synthetic.is_empty() {
        return Err(Error::EmptyInput(
            "both datasets must contain at least one sequence".into(),
        ));
    }
    let settings = ReportSettings {
        bins,
        acf_max_lag: max_lag,
        ..defaults
    };
    let report = evaluation_report(&real, &synthetic, &settings, None)?;

    ensure_out_dir(&out)?;
    let mut outputs = vec!["report.json".to_string()];
    if plots {
        // Pooled-value histogram overlay on the report's shared binning.
        let real_pool: Vec<f64> = real.iter().flatten().copied().collect();
        let synth_pool: Vec<f64> = synthetic.iter().flatten().copied().collect();
        let (lo, hi) = (report.settings.range_lo, report.settings.range_hi);
        let hp = histogram(&real_pool, bins, lo, hi, settings.hist_eps)?;
        let hq = histogram(&synth_pool, bins, lo, hi, settings.hist_eps)?;
        let width = (hi - lo) / bins as f64;
        let centers = |masses: &[f64]| -> Vec<(f64, f64)> {
            masses
                .iter()
                .enumerate()
                .map(|(i, m)| (lo + (i as f64 + 0.5) * width, *m))
                .collect()
        };
        let hist_svg = line_chart(
            "velocity distribution",
            "velocity",
            "probability mass",
            &[
                Series {
                    label: "real",
                    points: centers(&hp.masses),
                },
                Series {
                    label: "synthetic",
                    points: centers(&hq.masses),
                },
            ],
        );
        atomic_write(out.join("velocity_hist.svg"), hist_svg.as_bytes())?;
        outputs.push("velocity_hist.svg".into());

        let curve = |values: &[f64]| -> Vec<(f64, f64)> {
            values
                .iter()
                .enumerate()
                .map(|(lag, v)| (lag as f64, *v))
                .collect()
        };
        let acf_svg = line_chart(
            "autocorrelation",
            "lag",
            "acf",
            &[
                Series {
                    label: "real",
                    points: curve(&report.acf.real),
                },
                Series {
                    label: "synthetic",
                    points: curve(&report.acf.synthetic),
                },
            ],
        );
        atomic_write(out.join("acf.svg"), acf_svg.as_bytes())?;
        outputs.push("acf.svg".into());
    }

    let config_json = json!({
        "real": real_path.display().to_string(),
        "synthetic": synth_path.display().to_string(),
        "bins": bins,
        "max_lag": max_lag,
        "plots": plots,
    });
    let output_refs: Vec<&str> = outputs.iter().map(String::as_str).collect();
    let prov = provenance("evaluate", config_json, &output_refs);

    let mut doc = serde_json::to_value(&report)
        .map_err(|e| Error::Contract(format!("report serialization: {e}")))?;
    doc.as_object_mut().expect("report is an object").insert(
        "provenance".into(),
        serde_json::to_value(&prov).map_err(|e| Error::Contract(e.to_string()))?,
    );
    write_json(&out.join("report.json"), &doc)?;
    write_json(&out.join("provenance.json"), &prov)?;
    Ok(EXIT_OK)
}
