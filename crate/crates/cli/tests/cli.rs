//! End-to-end checks of the `vsxc` binary over real files.

use std::fs;
use std::path::Path;
use std::process::Command;

fn vsxc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vsxc"))
}

fn run_ok(cmd: &mut Command) -> String {
    let out = cmd.output().expect("spawn vsxc");
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn quick_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("quick.json");
    fs::write(
        &path,
        r#"{
  "skip_ga": true,
  "gbt": { "n_rounds": 40, "max_depth": 4, "learning_rate": 0.1, "lambda": 1.0, "gamma": 0.0, "early_stopping_rounds": 30, "validation_fraction": 0.1 },
  "clusterlstm": { "k": 4, "window": 24, "hidden": 6, "layers": 2, "epochs": 20, "learning_rate": 0.01, "min_cluster_size": 5 }
}"#,
    )
    .unwrap();
    path
}

#[test]
fn stagewise_flow_over_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();

    run_ok(vsxc().args([
        "synth",
        "--out-prefix",
        &p("data"),
        "--length",
        "600",
        "--seed",
        "5",
    ]));
    assert!(dir.path().join("data.csv").exists());
    assert!(dir.path().join("data_trend.csv").exists());

    run_ok(vsxc().args([
        "filter",
        "--input",
        &p("data.csv"),
        "--output",
        &p("filtered.csv"),
        "--q",
        "1",
        "--r",
        "16",
    ]));

    run_ok(vsxc().args([
        "decompose",
        "--input",
        &p("filtered.csv"),
        "--out-prefix",
        &p("comp"),
    ]));
    for suffix in ["_T.csv", "_S.csv", "_R.csv", "_summary.json"] {
        assert!(dir.path().join(format!("comp{suffix}")).exists());
    }
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("comp_summary.json")).unwrap())
            .unwrap();
    assert!(summary["recon_mse"].as_f64().unwrap() >= 0.0);
    assert_eq!(summary["center_freqs"].as_array().unwrap().len(), 3);

    let diagnosis = run_ok(vsxc().args([
        "diagnose",
        "--trend",
        &p("comp_T.csv"),
        "--periodic",
        &p("comp_S.csv"),
        "--residual",
        &p("comp_R.csv"),
        "--lag",
        "24",
    ]));
    let report: serde_json::Value = serde_json::from_str(&diagnosis).unwrap();
    assert_eq!(
        report["mann_kendall_trend"]["reject_at_05"],
        serde_json::Value::Bool(true)
    );

    run_ok(vsxc().args([
        "fit-trend",
        "--input",
        &p("comp_T.csv"),
        "--output",
        &p("trend.json"),
    ]));
    run_ok(vsxc().args([
        "fit-periodic",
        "--trend",
        &p("comp_T.csv"),
        "--periodic",
        &p("comp_S.csv"),
        "--residual",
        &p("comp_R.csv"),
        "--series",
        &p("filtered.csv"),
        "--output",
        &p("gbt.json"),
        "--rounds",
        "30",
    ]));
    run_ok(vsxc().args([
        "fit-residual",
        "--input",
        &p("comp_R.csv"),
        "--output",
        &p("resid.json"),
        "--epochs",
        "10",
        "--k",
        "2",
    ]));
    for model in ["trend.json", "gbt.json", "resid.json"] {
        let text = fs::read_to_string(dir.path().join(model)).unwrap();
        assert!(serde_json::from_str::<serde_json::Value>(&text).is_ok());
    }

    let eval = run_ok(vsxc().args([
        "evaluate",
        "--pred",
        &p("comp_T.csv"),
        "--target",
        &p("comp_T.csv"),
    ]));
    let metrics: serde_json::Value = serde_json::from_str(&eval).unwrap();
    assert_eq!(metrics["rmse"].as_f64().unwrap(), 0.0);
}

#[test]
fn predict_writes_forecast_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = quick_config(dir.path());
    let out_dir = dir.path().join("out");
    run_ok(vsxc().args([
        "predict",
        "--config",
        cfg.to_str().unwrap(),
        "--length",
        "600",
        "--seed",
        "9",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert!(report["total_metrics"]["rmse"].as_f64().unwrap().is_finite());
    assert!(report["runtime_seconds"].as_f64().unwrap() > 0.0);

    let predictions = fs::read_to_string(out_dir.join("predictions.csv")).unwrap();
    let mut lines = predictions.lines();
    assert_eq!(
        lines.next().unwrap(),
        "timestamp,trend,periodic,residual,total"
    );
    let n_rows = lines.count();
    assert_eq!(n_rows as u64, report["n_test"].as_u64().unwrap());
}

#[test]
fn tune_reports_monotone_history() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    run_ok(vsxc().args([
        "synth",
        "--out-prefix",
        &p("data"),
        "--length",
        "256",
        "--seed",
        "2",
    ]));
    let out = run_ok(vsxc().args([
        "tune",
        "--input",
        &p("data.csv"),
        "--pop",
        "6",
        "--gens",
        "3",
        "--seed",
        "1",
        "--max-iter",
        "50",
    ]));
    let result: serde_json::Value = serde_json::from_str(&out).unwrap();
    let history: Vec<f64> = result["history"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(history.len(), 4);
    for w in history.windows(2) {
        assert!(w[1] <= w[0]);
    }
}

#[test]
fn white_noise_gate_requires_force() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("noise.csv");
    // Deterministic white noise: no autocorrelation for Ljung-Box to find.
    let mut rows = String::from("value\n");
    let mut state = 1u64;
    for _ in 0..300 {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let u = (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
        rows.push_str(&format!("{u}\n"));
    }
    fs::write(&path, rows).unwrap();

    let out = vsxc()
        .args([
            "fit-residual",
            "--input",
            path.to_str().unwrap(),
            "--output",
            dir.path().join("m.json").to_str().unwrap(),
            "--epochs",
            "2",
            "--k",
            "2",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("white-noise"), "stderr: {stderr}");

    run_ok(vsxc().args([
        "fit-residual",
        "--input",
        path.to_str().unwrap(),
        "--output",
        dir.path().join("m.json").to_str().unwrap(),
        "--epochs",
        "2",
        "--k",
        "2",
        "--force",
    ]));
}

#[test]
fn ablate_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = quick_config(dir.path());
    let mut outputs = Vec::new();
    for name in ["a.json", "b.json"] {
        let path = dir.path().join(name);
        run_ok(vsxc().args([
            "ablate",
            "--seed",
            "7",
            "--length",
            "600",
            "--config",
            cfg.to_str().unwrap(),
            "--output",
            path.to_str().unwrap(),
        ]));
        outputs.push(fs::read(path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn errors_carry_stage_tags_and_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    run_ok(vsxc().args([
        "synth",
        "--out-prefix",
        &p("data"),
        "--length",
        "600",
        "--seed",
        "3",
    ]));
    let cfg_path = dir.path().join("bad.json");
    fs::write(&cfg_path, r#"{ "skip_ga": true, "kalman": { "q": -1.0, "r": 16.0 } }"#).unwrap();
    let out = vsxc()
        .args([
            "predict",
            "--config",
            cfg_path.to_str().unwrap(),
            "--input",
            &p("data.csv"),
            "--out-dir",
            &p("out"),
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("filter:"), "stderr: {stderr}");
}
