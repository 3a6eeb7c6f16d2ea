//! End-to-end runs of the `gazegen` binary: file formats, exit codes,
//! config-file merging, and reproducibility.

use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gazegen"))
}

fn write_recording(path: &Path, samples: usize) {
    let mut text = String::from("t_ms,left_x,left_y,right_x,right_y\n");
    for i in 0..samples {
        let t = i as f64;
        // A wandering gaze with non-constant speed.
        let lx = (t * 0.11).sin() * 40.0 + t * 0.01;
        let ly = (t * 0.07).cos() * 25.0;
        text.push_str(&format!("{t},{lx},{ly},{},{}\n", lx + 1.0, ly - 1.0));
    }
    fs::write(path, text).unwrap();
}

fn write_tiny_dataset(path: &Path, rows: usize, len: usize) {
    let mut text = String::new();
    for i in 0..rows {
        let row: Vec<String> = (0..len)
            .map(|j| {
                let v = 0.5 + 0.45 * ((i as f64 + 1.0) * 0.37 + j as f64 * 0.9).sin();
                format!("{v}")
            })
            .collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    fs::write(path, text).unwrap();
}

#[test]
fn ingest_segments_a_thousand_sample_recording_into_four_sequences() {
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("rec.csv");
    write_recording(&rec, 1000);
    let out = dir.path().join("out");
    let status = bin()
        .args(["ingest", "--input"])
        .arg(&rec)
        .args(["--out"])
        .arg(&out)
        .args(["--length", "200", "--stride", "200"])
        .status()
        .unwrap();
    assert!(status.success());

    // 1000 samples make 999 velocities: floor((999-200)/200)+1 = 4 windows.
    let dataset = fs::read_to_string(out.join("dataset.csv")).unwrap();
    assert_eq!(dataset.lines().count(), 4);
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("ingest_meta.json")).unwrap()).unwrap();
    assert_eq!(meta["sequences"], 4);
    assert!(out.join("velocity_left.csv").exists());
    assert!(out.join("provenance.json").exists());

    // Dataset values are normalized into [0, 1].
    for line in dataset.lines() {
        for cell in line.split(',') {
            let v: f64 = cell.parse().unwrap();
            assert!((0.0..=1.0).contains(&v));
        }
    }
}

#[test]
fn ingest_short_recording_warns_but_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("rec.csv");
    write_recording(&rec, 150);
    let out = dir.path().join("out");
    let output = bin()
        .args(["ingest", "--input"])
        .arg(&rec)
        .args(["--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("warning"));
    let dataset = fs::read_to_string(out.join("dataset.csv")).unwrap();
    assert_eq!(dataset.lines().count(), 0);
}

#[test]
fn ingest_missing_file_fails_with_path_in_message() {
    let output = bin()
        .args(["ingest", "--input", "/nonexistent/gone.csv"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("gone.csv"));
}

#[test]
fn train_writes_history_and_model_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    write_tiny_dataset(&data, 8, 16);

    let run = |out: &Path| {
        let status = bin()
            .args(["train", "--dataset"])
            .arg(&data)
            .args(["--out"])
            .arg(out)
            .args([
                "--seed", "5", "--epochs", "2", "--batch-size", "4", "--noise-dim", "6",
                "--generator", "lstm", "--discriminator", "lstm", "--eval-count", "8",
                "--window-start", "1", "--timing", "none",
            ])
            .status()
            .unwrap();
        assert!(status.success());
    };
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    run(&out_a);
    run(&out_b);

    let hist_a = fs::read(out_a.join("history.csv")).unwrap();
    let hist_b = fs::read(out_b.join("history.csv")).unwrap();
    assert_eq!(hist_a, hist_b, "history files differ between identical runs");

    let text = String::from_utf8(hist_a).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "epoch,l_g,l_d,l_spectral,l_final,d_js,seconds"
    );
    assert_eq!(lines.count(), 2);

    let model_a = fs::read(out_a.join("model.json")).unwrap();
    let model_b = fs::read(out_b.join("model.json")).unwrap();
    assert_eq!(model_a, model_b);
}

#[test]
fn train_rejects_negative_lambda_before_training() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    write_tiny_dataset(&data, 8, 16);
    let out = dir.path().join("out");
    let output = bin()
        .args(["train", "--dataset"])
        .arg(&data)
        .args(["--out"])
        .arg(&out)
        .args(["--seed", "1", "--lambda", "-0.5", "--epochs", "1", "--batch-size", "4"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("spectral weight"));
    assert!(!out.join("history.csv").exists() || {
        // If the history file was created it must hold no completed epochs.
        fs::read_to_string(out.join("history.csv")).unwrap().lines().count() <= 1
    });
}

#[test]
fn generate_counts_and_determinism_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    write_tiny_dataset(&data, 8, 16);
    let train_out = dir.path().join("train");
    assert!(bin()
        .args(["train", "--dataset"])
        .arg(&data)
        .args(["--out"])
        .arg(&train_out)
        .args([
            "--seed", "9", "--epochs", "1", "--batch-size", "4", "--noise-dim", "6",
            "--generator", "lstm", "--discriminator", "lstm", "--eval-count", "4",
            "--window-start", "1", "--timing", "none",
        ])
        .status()
        .unwrap()
        .success());
    let model = train_out.join("model.json");

    // count 5: five rows of sequence-length values
    let gen_out = dir.path().join("gen5");
    assert!(bin()
        .args(["generate", "--model"])
        .arg(&model)
        .args(["--out"])
        .arg(&gen_out)
        .args(["--count", "5", "--seed", "3"])
        .status()
        .unwrap()
        .success());
    let text = fs::read_to_string(gen_out.join("generated.csv")).unwrap();
    assert_eq!(text.lines().count(), 5);
    for line in text.lines() {
        assert_eq!(line.split(',').count(), 16);
    }

    // same seed: identical bytes
    let gen_again = dir.path().join("gen5b");
    assert!(bin()
        .args(["generate", "--model"])
        .arg(&model)
        .args(["--out"])
        .arg(&gen_again)
        .args(["--count", "5", "--seed", "3"])
        .status()
        .unwrap()
        .success());
    assert_eq!(
        fs::read(gen_out.join("generated.csv")).unwrap(),
        fs::read(gen_again.join("generated.csv")).unwrap()
    );

    // count 0: empty output, still success
    let gen_zero = dir.path().join("gen0");
    assert!(bin()
        .args(["generate", "--model"])
        .arg(&model)
        .args(["--out"])
        .arg(&gen_zero)
        .args(["--count", "0", "--seed", "3"])
        .status()
        .unwrap()
        .success());
    assert_eq!(fs::read(gen_zero.join("generated.csv")).unwrap().len(), 0);

    // corrupt model: integrity error
    let text = fs::read_to_string(&model).unwrap();
    let needle = "\"min\":";
    assert!(text.contains(needle));
    let corrupted = text.replacen("\"min\": 0", "\"min\": 9", 1);
    let bad_model = dir.path().join("bad_model.json");
    fs::write(&bad_model, corrupted).unwrap();
    let output = bin()
        .args(["generate", "--model"])
        .arg(&bad_model)
        .args(["--out"])
        .arg(dir.path().join("genbad"))
        .args(["--count", "1", "--seed", "3"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("integrity"));
}

#[test]
fn evaluate_self_comparison_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    write_tiny_dataset(&data, 6, 24);
    let out = dir.path().join("out");
    assert!(bin()
        .args(["evaluate", "--real"])
        .arg(&data)
        .args(["--synthetic"])
        .arg(&data)
        .args(["--out"])
        .arg(&out)
        .args(["--plots"])
        .status()
        .unwrap()
        .success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert!(report["d_js"].as_f64().unwrap() < 1e-12);
    assert!(report["spectral_score"].as_f64().unwrap() < 1e-12);
    assert_eq!(report["acf"]["real"][0], 1.0);
    assert!(out.join("velocity_hist.svg").exists());
    assert!(out.join("acf.svg").exists());

    // The report round-trips through parse and re-serialization.
    let text = serde_json::to_string(&report).unwrap();
    let back: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);
}

#[test]
fn evaluate_disjoint_supports_reaches_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let real = dir.path().join("real.csv");
    let synth = dir.path().join("synth.csv");
    fs::write(&real, "0.0,0.1,0.2,0.15\n0.05,0.12,0.18,0.02\n").unwrap();
    fs::write(&synth, "0.9,0.95,1.0,0.85\n0.8,0.92,0.99,0.81\n").unwrap();
    let out = dir.path().join("out");
    assert!(bin()
        .args(["evaluate", "--real"])
        .arg(&real)
        .args(["--synthetic"])
        .arg(&synth)
        .args(["--out"])
        .arg(&out)
        .status()
        .unwrap()
        .success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    // Smoothing keeps the divergence a hair under the exact bound of one.
    assert!(report["d_js"].as_f64().unwrap() > 0.999999);
}

#[test]
fn sweep_tiny_run_produces_all_pairings() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    write_tiny_dataset(&data, 8, 16);
    let out = dir.path().join("out");
    let status = bin()
        .args(["sweep", "--dataset"])
        .arg(&data)
        .args(["--out"])
        .arg(&out)
        .args([
            "--seed", "2", "--epochs", "2", "--batch-size", "4", "--noise-dim", "6",
            "--eval-count", "4", "--window-start", "1", "--timing", "none",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("sweep.json")).unwrap()).unwrap();
    assert_eq!(report["entries"].as_array().unwrap().len(), 4);
    assert_eq!(report["partial"], false);
    assert!(report["winner"].is_string());
    for name in ["cnn-cnn", "cnn-lstm", "lstm-cnn", "lstm-lstm"] {
        assert!(out.join(format!("history_{name}.csv")).exists());
    }
    for entry in report["entries"].as_array().unwrap() {
        assert!(entry["spectral_integral"].as_f64().unwrap() >= 0.0);
        assert!(entry["d_js_integral"].as_f64().unwrap() >= 0.0);
    }
}

#[test]
fn sweep_with_cnn_hostile_length_is_partial() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    // Length 20 is fine for LSTM generators but not a multiple of 8, so
    // both CNN-generator pairings fail.
    write_tiny_dataset(&data, 8, 20);
    let out = dir.path().join("out");
    let output = bin()
        .args(["sweep", "--dataset"])
        .arg(&data)
        .args(["--out"])
        .arg(&out)
        .args([
            "--seed", "2", "--epochs", "1", "--batch-size", "4", "--noise-dim", "6",
            "--eval-count", "4", "--window-start", "1", "--timing", "none",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2), "partial sweep exit code");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("sweep.json")).unwrap()).unwrap();
    assert_eq!(report["partial"], true);
    assert_eq!(report["entries"].as_array().unwrap().len(), 2);
    assert_eq!(report["failures"].as_array().unwrap().len(), 2);
}

#[test]
fn sweep_reruns_byte_identical_with_timing_none() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    write_tiny_dataset(&data, 8, 16);
    let run = |out: &Path| {
        assert!(bin()
            .args(["sweep", "--dataset"])
            .arg(&data)
            .args(["--out"])
            .arg(out)
            .args([
                "--seed", "2", "--epochs", "2", "--batch-size", "4", "--noise-dim", "6",
                "--eval-count", "4", "--window-start", "1", "--timing", "none",
            ])
            .status()
            .unwrap()
            .success());
    };
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    run(&out_a);
    run(&out_b);
    for name in ["cnn-cnn", "cnn-lstm", "lstm-cnn", "lstm-lstm"] {
        let file = format!("history_{name}.csv");
        assert_eq!(
            fs::read(out_a.join(&file)).unwrap(),
            fs::read(out_b.join(&file)).unwrap(),
            "{file} differs"
        );
    }
    assert_eq!(
        fs::read(out_a.join("sweep.json")).unwrap(),
        fs::read(out_b.join("sweep.json")).unwrap()
    );
}

fn write_velocity_series(path: &Path, values: &[f64]) {
    let mut text = String::from("t_ms,v\n");
    for (i, v) in values.iter().enumerate() {
        text.push_str(&format!("{i},{v}\n"));
    }
    fs::write(path, text).unwrap();
}

#[test]
fn hmm_range_writes_selection_table() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("v.csv");
    // Two clearly separated regimes.
    let values: Vec<f64> = (0..600)
        .map(|i| {
            if (i / 50) % 2 == 0 {
                0.1 + 0.01 * (i as f64 * 0.7).sin()
            } else {
                1.0 + 0.01 * (i as f64 * 0.9).cos()
            }
        })
        .collect();
    write_velocity_series(&series, &values);
    let out = dir.path().join("out");
    assert!(bin()
        .args(["hmm", "--series"])
        .arg(&series)
        .args(["--out"])
        .arg(&out)
        .args(["--seed", "4", "--state-range", "2..5", "--max-iter", "50"])
        .status()
        .unwrap()
        .success());
    let table = fs::read_to_string(out.join("selection.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next().unwrap(), "states,d_js");
    assert_eq!(lines.count(), 4);
    let model: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("hmm_model.json")).unwrap()).unwrap();
    assert!(model["model"]["selection"]["selected"].as_u64().unwrap() >= 2);
}

#[test]
fn hmm_single_state_matches_sample_mean() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("v.csv");
    let values: Vec<f64> = (0..400).map(|i| 2.0 + (i as f64 * 0.31).sin()).collect();
    write_velocity_series(&series, &values);
    let out = dir.path().join("out");
    assert!(bin()
        .args(["hmm", "--series"])
        .arg(&series)
        .args(["--out"])
        .arg(&out)
        .args(["--seed", "4", "--states", "1", "--max-iter", "3"])
        .status()
        .unwrap()
        .success());
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("hmm_model.json")).unwrap()).unwrap();
    let mean = doc["model"]["model"]["means"][0].as_f64().unwrap();
    let want = values.iter().sum::<f64>() / values.len() as f64;
    assert!((mean - want).abs() < 1e-6, "{mean} vs {want}");
}

#[test]
fn hmm_empty_series_fails() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("v.csv");
    fs::write(&series, "t_ms,v\n").unwrap();
    let output = bin()
        .args(["hmm", "--series"])
        .arg(&series)
        .args(["--seed", "1", "--states", "2"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn kde_summary_matches_silverman_and_sampling_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("v.csv");
    let values: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.17).sin() * 0.5 + 1.0).collect();
    write_velocity_series(&series, &values);

    let run = |out: &Path| {
        assert!(bin()
            .args(["kde", "--series"])
            .arg(&series)
            .args(["--out"])
            .arg(out)
            .args(["--seed", "6", "--order", "1", "--length", "200"])
            .status()
            .unwrap()
            .success());
    };
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    run(&out_a);
    run(&out_b);

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_a.join("kde_summary.json")).unwrap())
            .unwrap();
    let h = summary["bandwidth"].as_f64().unwrap();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let want = 1.06 * sd * n.powf(-0.2);
    assert!((h - want).abs() / want < 1e-12);

    assert_eq!(
        fs::read(out_a.join("kde_sample.csv")).unwrap(),
        fs::read(out_b.join("kde_sample.csv")).unwrap()
    );
    assert_eq!(
        fs::read_to_string(out_a.join("kde_sample.csv"))
            .unwrap()
            .lines()
            .count(),
        201
    );
}

#[test]
fn kde_zero_length_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("v.csv");
    let values: Vec<f64> = (0..100).map(|i| (i as f64 * 0.3).cos()).collect();
    write_velocity_series(&series, &values);
    let out = dir.path().join("out");
    assert!(bin()
        .args(["kde", "--series"])
        .arg(&series)
        .args(["--out"])
        .arg(&out)
        .args(["--seed", "6", "--length", "0"])
        .status()
        .unwrap()
        .success());
    assert_eq!(
        fs::read_to_string(out.join("kde_sample.csv")).unwrap(),
        "t_ms,v\n"
    );
}

#[test]
fn config_file_supplies_values_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    write_tiny_dataset(&data, 8, 16);
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        format!(
            "dataset = \"{}\"\nseed = 7\nepochs = 3\nbatch-size = 4\nnoise-dim = 6\n\
             generator = \"lstm\"\ndiscriminator = \"lstm\"\neval-count = 4\n\
             window-start = 1\ntiming = \"none\"\n",
            data.display()
        ),
    )
    .unwrap();
    let out = dir.path().join("out");
    // --epochs 1 overrides the file's 3.
    assert!(bin()
        .args(["train", "--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(&out)
        .args(["--epochs", "1"])
        .status()
        .unwrap()
        .success());
    let history = fs::read_to_string(out.join("history.csv")).unwrap();
    assert_eq!(history.lines().count(), 2, "header plus exactly one epoch");

    let prov: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("provenance.json")).unwrap()).unwrap();
    assert_eq!(prov["config"]["epochs"], 1);
    assert_eq!(prov["config"]["seed"], 7);
    assert!(prov["config_hash"].as_str().unwrap().len() == 64);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "sed = 7\n").unwrap();
    let output = bin()
        .args(["kde", "--config"])
        .arg(&cfg)
        .args(["--series", "x.csv", "--seed", "1", "--length", "10"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("sed"));
}

#[test]
fn missing_seed_is_an_explicit_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    write_tiny_dataset(&data, 8, 16);
    let output = bin()
        .args(["train", "--dataset"])
        .arg(&data)
        .args(["--epochs", "1"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("seed"));
}
