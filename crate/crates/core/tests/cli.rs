mod common;

use std::path::Path;
use std::process::{Command, Output};

fn netgauntlet(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netgauntlet"))
        .args(args)
        .current_dir(dir)
        .env_remove("NETGAUNTLET_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_csv_body(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn select_writes_report_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    common::write_synthetic(tmp.path(), "kdd.csv", 400, 1);
    let o = netgauntlet(&["select", "--data", "kdd.csv", "--schema", "kdd99", "--out", "sel"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("features: 41 → "), "{}", stdout(&o));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(tmp.path().join("sel/selection.json")).unwrap()).unwrap();
    assert_eq!(json["run_config"]["corr_threshold"], 0.5);
    assert_eq!(json["selection"]["n_features"], 41);
    assert!(tmp.path().join("sel/selection.txt").exists());
}

#[test]
fn disabled_filters_drop_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    common::write_synthetic(tmp.path(), "kdd.csv", 300, 2);
    let o = netgauntlet(
        &["select", "--data", "kdd.csv", "--corr-threshold", "1.0", "--mi-threshold", "0", "--out", "o"],
        tmp.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("stage 1 dropped 0") && s.contains("stage 2 dropped 0"), "{s}");
}

#[test]
fn train_then_predict_memorizes_training_data() {
    let tmp = tempfile::tempdir().unwrap();
    common::write_synthetic(tmp.path(), "kdd.csv", 300, 3);
    let o = netgauntlet(&["train", "--data", "kdd.csv", "--classifier", "cart", "--model", "m.model.json"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let o = netgauntlet(&["predict", "--model", "m.model.json", "--data", "kdd.csv", "--out", "p"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv_body(&tmp.path().join("p/predictions.csv"));
    assert_eq!(rows[0], ["record", "predicted", "score", "actual"]);
    assert_eq!(rows.len(), 301);
    assert!(rows[1..].iter().all(|r| r[1] == r[3]));
    let first = std::fs::read(tmp.path().join("m.model.json")).unwrap();
    let o = netgauntlet(&["train", "--data", "kdd.csv", "--classifier", "cart", "--model", "m2.model.json"], tmp.path());
    assert!(o.status.success());
    assert_eq!(first, std::fs::read(tmp.path().join("m2.model.json")).unwrap());
}

#[test]
fn predict_on_a_different_schema_exits_5() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("small.schema"), "a:continuous\nb:symbolic\n").unwrap();
    std::fs::write(tmp.path().join("small.csv"), "1,x,normal.\n2,y,smurf.\n3,x,normal.\n4,y,smurf.\n").unwrap();
    let o = netgauntlet(
        &["train", "--data", "small.csv", "--schema", "small.schema", "--classifier", "id3", "--model", "small.model.json"],
        tmp.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    common::write_synthetic(tmp.path(), "kdd.csv", 20, 4);
    let o = netgauntlet(&["predict", "--model", "small.model.json", "--data", "kdd.csv", "--out", "p"], tmp.path());
    assert_eq!(o.status.code(), Some(5), "{}", stderr(&o));
    assert!(!tmp.path().join("p").exists());
}

#[test]
fn exit_codes_for_config_and_data_errors() {
    let tmp = tempfile::tempdir().unwrap();
    common::write_synthetic(tmp.path(), "kdd.csv", 50, 5);
    let bad_threshold = netgauntlet(&["select", "--data", "kdd.csv", "--corr-threshold", "1.5"], tmp.path());
    assert_eq!(bad_threshold.status.code(), Some(2));
    let unknown_flag = netgauntlet(&["select", "--bogus"], tmp.path());
    assert_eq!(unknown_flag.status.code(), Some(2));
    let missing = netgauntlet(&["select", "--data", "nope.csv"], tmp.path());
    assert_eq!(missing.status.code(), Some(3));
    assert!(stderr(&missing).contains("nope.csv"));
    std::fs::write(tmp.path().join("broken.csv"), "1,2,3\n").unwrap();
    let malformed = netgauntlet(&["select", "--data", "broken.csv"], tmp.path());
    assert_eq!(malformed.status.code(), Some(3));
    assert!(stderr(&malformed).contains("row 1"), "{}", stderr(&malformed));
}

#[test]
fn divergence_exits_4_and_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    common::write_synthetic(tmp.path(), "kdd.csv", 200, 6);
    let o = netgauntlet(
        &[
            "evaluate", "--data", "kdd.csv", "--classifier", "all", "--k", "3", "--trees", "3", "--learning-rate", "1e308", "--out", "ev",
        ],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(!tmp.path().join("ev").exists());
}

#[test]
fn config_file_from_env_is_overridden_by_flags() {
    let tmp = tempfile::tempdir().unwrap();
    common::write_synthetic(tmp.path(), "kdd.csv", 200, 7);
    std::fs::write(tmp.path().join("run.toml"), "bins = 5\ncorr_threshold = 0.7\n[forest]\nn_trees = 4\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_netgauntlet"))
        .args(["select", "--data", "kdd.csv", "--bins", "8", "--out", "o"])
        .current_dir(tmp.path())
        .env("NETGAUNTLET_CONFIG", tmp.path().join("run.toml"))
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(tmp.path().join("o/selection.json")).unwrap()).unwrap();
    let rc = &json["run_config"];
    assert_eq!(rc["bins"], 8);
    assert_eq!(rc["corr_threshold"], 0.7);
    assert_eq!(rc["forest"]["n_trees"], 4);
    assert_eq!(rc["mi_threshold"], 0.001);

    std::fs::write(tmp.path().join("bad.toml"), "no_such_key = 1\n").unwrap();
    let o = netgauntlet(&["select", "--data", "kdd.csv", "--config", "bad.toml"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn evaluate_compare_writes_one_row_per_classifier() {
    let tmp = tempfile::tempdir().unwrap();
    common::write_synthetic(tmp.path(), "kdd.csv", 300, 8);
    let o = netgauntlet(
        &["evaluate", "--data", "kdd.csv", "--classifier", "all", "--compare", "--seed", "7", "--k", "3", "--trees", "5", "--epochs", "5", "--out", "ev"],
        tmp.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv_body(&tmp.path().join("ev/comparison.csv"));
    assert_eq!(rows.len(), 5);
    let names: Vec<&str> = rows[1..].iter().map(|r| r[0].as_str()).collect();
    assert_eq!(names, ["cart", "mlp", "id3", "random_forest"]);
    let cv = read_csv_body(&tmp.path().join("ev/cv_cart_selected.csv"));
    assert_eq!(cv[0].join(","), "fold,accuracy,precision,recall,error,dr,far,auc,build_seconds");
    assert_eq!(cv.len(), 1 + 3 + 1);
    assert_eq!(cv[4][0], "aggregate");
    let metrics = read_csv_body(&tmp.path().join("ev/metrics.csv"));
    assert_eq!(metrics.len(), 1 + 8);
    let report = std::fs::read_to_string(tmp.path().join("ev/report.txt")).unwrap();
    assert!(report.starts_with("# run_config: "));
    assert!(report.contains("averaging    micro"));
}

#[test]
fn literal_accuracy_flag_changes_accuracy_only() {
    let tmp = tempfile::tempdir().unwrap();
    common::write_synthetic(tmp.path(), "kdd.csv", 200, 9);
    let base = ["evaluate", "--data", "kdd.csv", "--classifier", "cart", "--k", "3"];
    let o = netgauntlet(&[&base[..], &["--out", "std"]].concat(), tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let o = netgauntlet(&[&base[..], &["--out", "lit", "--paper-literal-accuracy"]].concat(), tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let std_rows = read_csv_body(&tmp.path().join("std/cv_cart_selected.csv"));
    let lit_rows = read_csv_body(&tmp.path().join("lit/cv_cart_selected.csv"));
    let agg = |rows: &[Vec<String>]| rows.last().unwrap().clone();
    let (s, l) = (agg(&std_rows), agg(&lit_rows));
    let (sa, la): (f64, f64) = (s[1].parse().unwrap(), l[1].parse().unwrap());
    assert!(la < sa, "{la} !< {sa}");
    for col in [2, 3, 5, 6, 7] {
        assert_eq!(s[col], l[col], "column {col}");
    }
}

#[test]
fn category5_mode_uses_five_classes() {
    let tmp = tempfile::tempdir().unwrap();
    common::write_synthetic(tmp.path(), "kdd.csv", 300, 10);
    let o = netgauntlet(
        &["train", "--data", "kdd.csv", "--label-mode", "category5", "--classifier", "cart", "--model", "c5.model.json"],
        tmp.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let model: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(tmp.path().join("c5.model.json")).unwrap()).unwrap();
    assert_eq!(model["model"]["classes"], serde_json::json!(["normal", "dos", "probe", "r2l", "u2r"]));
    let o = netgauntlet(&["predict", "--model", "c5.model.json", "--data", "kdd.csv", "--out", "p"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv_body(&tmp.path().join("p/predictions.csv"));
    assert!(rows[1..].iter().all(|r| r[1] == r[3]));
}
