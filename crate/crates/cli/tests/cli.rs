use std::path::Path;
use std::process::{Command, Output};

fn rotgrid(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotgrid")).args(args).current_dir(dir).output().expect("binary runs")
}

fn ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn generate_writes_two_features_and_target() {
    let dir = tempfile::tempdir().unwrap();
    ok(&rotgrid(&["generate", "--problem", "ridge2d", "--n", "500", "--seed", "1", "--out", "a.csv", "--test-out", "b.csv"], dir.path()));
    let text = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("f1,f2,target"));
    assert_eq!(lines.count(), 500);
    assert!(dir.path().join("b.csv").exists());

    ok(&rotgrid(&["generate", "--problem", "ridge2d", "--n", "500", "--seed", "1", "--out", "c.csv"], dir.path()));
    assert_eq!(text, std::fs::read_to_string(dir.path().join("c.csv")).unwrap());
}

#[test]
fn fit_then_evaluate_matches_trace() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&rotgrid(&["generate", "--problem", "ridge2d", "--n", "800", "--seed", "2", "--out", "train.csv", "--test-out", "test.csv"], d));
    let common = ["fit", "--train", "train.csv", "--test", "test.csv", "--mode", "anova", "--max-points", "60", "--opt-restarts", "2"];
    let mut rotated: Vec<&str> = common.to_vec();
    rotated.extend(["--model", "rot.txt", "--trace", "rot.csv", "--metrics", "rot.json"]);
    ok(&rotgrid(&rotated, d));
    let mut base: Vec<&str> = common.to_vec();
    base.extend(["--baseline", "--model", "base.txt", "--trace", "base.csv", "--metrics", "base.json"]);
    ok(&rotgrid(&base, d));

    for name in ["rot.csv", "base.csv"] {
        let trace = std::fs::read_to_string(d.join(name)).unwrap();
        assert!(trace.starts_with("iteration,grid_points,train_rmse,test_nrmse\n"));
        assert!(trace.lines().count() >= 2);
    }
    let fit_metrics: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("rot.json")).unwrap()).unwrap();
    let out = rotgrid(&["evaluate", "--model", "rot.txt", "--data", "test.csv"], d);
    ok(&out);
    let eval: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let a = fit_metrics["nrmse"].as_f64().unwrap();
    let b = eval["nrmse"].as_f64().unwrap();
    assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
    assert_eq!(fit_metrics["grid_points"], eval["grid_points"]);
    assert_eq!(fit_metrics["q_matrix"], eval["q_matrix"]);
}

#[test]
fn retraining_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&rotgrid(&["generate", "--problem", "ridge5d", "--n", "400", "--seed", "3", "--out", "train.csv"], d));
    for name in ["t1.csv", "t2.csv"] {
        let args = ["fit", "--train", "train.csv", "--max-points", "120", "--opt-restarts", "1", "--seed", "7", "--model", "m.txt", "--trace", name];
        ok(&rotgrid(&args, d));
    }
    assert_eq!(std::fs::read(d.join("t1.csv")).unwrap(), std::fs::read(d.join("t2.csv")).unwrap());
}

#[test]
fn constant_data_evaluates_to_zero_error() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut csv = String::from("f1,f2,target\n");
    for i in 0..200 {
        let t = i as f64 / 37.0;
        csv.push_str(&format!("{},{},1.5\n", t.sin(), t.cos()));
    }
    std::fs::write(d.join("const.csv"), csv).unwrap();
    ok(&rotgrid(&["fit", "--train", "const.csv", "--baseline", "--max-points", "20", "--model", "m.txt", "--metrics", "fit.json"], d));
    let out = rotgrid(&["evaluate", "--model", "m.txt", "--data", "const.csv"], d);
    ok(&out);
    let eval: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(eval["nrmse"].as_f64().unwrap() < 1e-10);
}

#[test]
fn sweep_emits_table() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&rotgrid(&["generate", "--problem", "ridge2d", "--n", "300", "--seed", "4", "--out", "data.csv"], d));
    let args = ["sweep", "--data", "data.csv", "--splits", "2", "--lambdas", "1e-2,1e-4", "--max-points", "30", "--opt-restarts", "1", "--include-baseline", "--out", "table.csv"];
    ok(&rotgrid(&args, d));
    let table = std::fs::read_to_string(d.join("table.csv")).unwrap();
    assert!(table.starts_with("transform,mode,lambda,splits,mean_nrmse,std_nrmse,mean_grid_points\n"));
    assert_eq!(table.lines().count(), 1 + 2 * 2 * 2);
}

#[test]
fn bad_input_fails_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("bad.csv"), "f1,target\n1.0,oops\n").unwrap();
    let out = rotgrid(&["fit", "--train", "bad.csv"], d);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a number"));

    let out = rotgrid(&["fit", "--train", "bad.csv", "--mode", "sideways"], d);
    assert!(!out.status.success());
    let out = rotgrid(&["evaluate", "--model", "missing.txt", "--data", "bad.csv"], d);
    assert!(!out.status.success());
}
