use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_retention-lab");

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    run(dir, args).status.code().expect("exit code")
}

fn synth(dir: &Path, n: &str) {
    ok(dir, &["synth", "--n", n, "--seed", "7", "--base-rate", "0.5", "--out", "cohort.csv"]);
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn synth_writes_header_plus_rows_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "2000");
    let first = fs::read(dir.path().join("cohort.csv")).unwrap();
    assert_eq!(first.iter().filter(|&&b| b == b'\n').count(), 2001);
    assert!(first.starts_with(b"Genero,EdadUltimaActividad,TiempoFacultad,"));
    synth(dir.path(), "2000");
    assert_eq!(fs::read(dir.path().join("cohort.csv")).unwrap(), first);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(d, &["synth", "--n", "0", "--out", "x.csv"]), 2);
    assert!(!d.join("x.csv").exists());
    assert_eq!(code(d, &["synth", "--base-rate", "1.5", "--out", "x.csv"]), 2);
    assert_eq!(code(d, &["no-such-command"]), 2);
    fs::write(d.join("bad.cfg"), "max_depth = 3\n").unwrap();
    assert_eq!(code(d, &["synth", "--config", "bad.cfg", "--out", "x.csv"]), 2);
    fs::write(d.join("obj.cfg"), "objective = regression\n").unwrap();
    assert_eq!(code(d, &["synth", "--config", "obj.cfg", "--out", "x.csv"]), 2);
}

#[test]
fn data_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(d, &["train", "--data", "missing.csv", "--iterations", "1"]), 3);
    fs::write(d.join("short.csv"), "Genero,Abandono\n1,0\n").unwrap();
    let out = run(d, &["train", "--data", "short.csv", "--iterations", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("short.csv"));
}

#[test]
fn train_defaults_are_echoed_in_model() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, "400");
    ok(d, &["train", "--data", "cohort.csv", "--iterations", "0", "--out-dir", "run"]);
    let model = json(&d.join("run/model.json"));
    let params = &model["params"];
    assert_eq!(params["max_bin"], 512);
    assert_eq!(params["learning_rate"], 0.05);
    assert_eq!(params["num_leaves"], 10);
    assert_eq!(params["min_data"], 100);
    assert_eq!(params["boost_from_average"], true);
    assert_eq!(params["boosting_type"], "gbdt");
    assert_eq!(params["objective"], "binary");
    assert_eq!(params["metric"], "binary_logloss");
    assert_eq!(params["verbose"], -1);
    assert_eq!(model["trees"].as_array().unwrap().len(), 0);
    assert!(model["base_score"].as_f64().unwrap().is_finite());
    let history = fs::read_to_string(d.join("run/history.csv")).unwrap();
    assert_eq!(history, "iteration,valid_logloss,train_logloss\n");
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, "400");
    fs::write(d.join("run.cfg"), "num_iterations = 3\nnum_leaves = 4\nmin_data = 20\n").unwrap();
    ok(d, &["train", "--config", "run.cfg", "--data", "cohort.csv", "--num-leaves", "6"]);
    let model = json(&d.join("model.json"));
    assert_eq!(model["params"]["num_iterations"], 3);
    assert_eq!(model["params"]["num_leaves"], 6);
    assert_eq!(model["trees"].as_array().unwrap().len(), 3);
}

#[test]
fn full_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, "2000");
    ok(d, &["train", "--data", "cohort.csv", "--iterations", "500", "--out-dir", "run"]);

    let history = fs::read_to_string(d.join("run/history.csv")).unwrap();
    let valid: Vec<f64> = history
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(valid.len(), 500);
    assert!(valid[499] < valid[0]);

    let printed = ok(d, &["evaluate", "--data", "cohort.csv", "--model", "run/model.json", "--out-dir", "run"]);
    for label in ["Accuracy", "Precision", "Recall", "F1 Score", "ROC AUC Score", "Log Loss"] {
        assert!(printed.contains(label), "{printed}");
    }
    let raw = fs::read_to_string(d.join("run/metrics.json")).unwrap();
    let keys = ["accuracy", "precision", "recall", "f1", "roc_auc", "log_loss", "threshold", "confusion"];
    let positions: Vec<usize> = keys
        .iter()
        .map(|k| raw.find(&format!("\"{k}\":")).unwrap_or_else(|| panic!("missing {k}")))
        .collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{raw}");
    let metrics = json(&d.join("run/metrics.json"));
    assert_eq!(metrics.as_object().unwrap().len(), keys.len());
    let mut confusion: Vec<&str> = metrics["confusion"].as_object().unwrap().keys().map(String::as_str).collect();
    confusion.sort_unstable();
    assert_eq!(confusion, ["fn", "fp", "tn", "tp"]);
    assert_eq!(metrics["threshold"], 0.5);
    assert!(metrics["roc_auc"].as_f64().unwrap() >= 0.85);

    ok(
        d,
        &[
            "explain",
            "--data",
            "cohort.csv",
            "--model",
            "run/model.json",
            "--out-dir",
            "explain",
            "--interactions",
            "TiempoFacultad,EdadUltimaActividad",
        ],
    );
    let table = fs::read_to_string(d.join("explain/importance.txt")).unwrap();
    assert_eq!(table.lines().count(), 15);
    assert!(table.starts_with("Variable"));
    let shap = fs::read_to_string(d.join("explain/shap_values.csv")).unwrap();
    assert_eq!(shap.lines().count(), 601);
    let triples = fs::read_to_string(d.join("explain/interactions/TiempoFacultad__EdadUltimaActividad.csv")).unwrap();
    assert_eq!(triples.lines().next(), Some("TiempoFacultad,EdadUltimaActividad,shap_interaction"));
    assert_eq!(triples.lines().count(), 601);
    assert!(d.join("explain/dependence/NumeroRegulares.svg").exists());

    // Same flags, same bytes.
    ok(
        d,
        &[
            "explain",
            "--data",
            "cohort.csv",
            "--model",
            "run/model.json",
            "--out-dir",
            "again",
            "--interactions",
            "TiempoFacultad,EdadUltimaActividad",
        ],
    );
    for f in ["shap_values.csv", "importance.txt", "dependence/TiempoFacultad.svg"] {
        assert_eq!(fs::read(d.join("explain").join(f)).unwrap(), fs::read(d.join("again").join(f)).unwrap());
    }

    // Explaining with an unknown pair or a foreign seed is refused.
    let args = ["explain", "--data", "cohort.csv", "--model", "run/model.json", "--out-dir", "x"];
    assert_eq!(code(d, &[&args[..], &["--interactions", "TiempoFacultad,Nope"]].concat()), 2);
    assert_eq!(code(d, &["evaluate", "--data", "cohort.csv", "--model", "run/model.json", "--seed", "1"]), 2);
}

#[test]
fn evaluate_refuses_a_different_cohort() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, "300");
    ok(d, &["train", "--data", "cohort.csv", "--iterations", "2", "--min-data", "20"]);
    ok(d, &["synth", "--n", "300", "--seed", "8", "--out", "other.csv"]);
    let out = run(d, &["evaluate", "--data", "other.csv"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not the one the model was trained on"));
}

#[test]
fn single_leaf_model_has_zero_attributions() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, "300");
    // With min_data above half the rows no split is legal.
    ok(d, &["train", "--data", "cohort.csv", "--iterations", "3", "--min-data", "200"]);
    let model = json(&d.join("model.json"));
    for tree in model["trees"].as_array().unwrap() {
        assert_eq!(tree["nodes"].as_array().unwrap().len(), 1);
    }
    ok(d, &["explain", "--data", "cohort.csv", "--split", "all", "--out-dir", "x"]);
    let shap = fs::read_to_string(d.join("x/shap_values.csv")).unwrap();
    let mut lines = shap.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.len(), 15);
    assert!(header[..14].iter().all(|h| h.ends_with("_shap")));
    let mut rows = 0;
    for line in lines {
        rows += 1;
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(cells[..14].iter().all(|&v| v == 0.0), "{line}");
    }
    assert_eq!(rows, 300);
}
