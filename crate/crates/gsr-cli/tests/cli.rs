//! End-to-end runs of the `gsr` binary: generate, construct, verify, apply,
//! recover, and a small experiment, checking files and exit codes.

use std::path::PathBuf;
use std::process::Command;

fn gsr() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gsr"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gsr-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn graph_construct_verify_roundtrip() {
    let graph = tmp("g4.txt");
    let plan = tmp("plan.json");

    let out = gsr()
        .args(["graph", "gen", "--family", "g4", "--n", "16", "--out"])
        .arg(&graph)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = gsr()
        .args(["construct", "--method", "g4", "--n", "16", "--k", "2", "--seed", "5", "--out"])
        .arg(&plan)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = gsr()
        .args(["verify", "--plan"])
        .arg(&plan)
        .args(["--graph"])
        .arg(&graph)
        .args(["--k", "2"])
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "verify failed: {stdout}");
    assert!(stdout.contains("feasibility: ok"));
    assert!(stdout.contains("identifiable"));
}

#[test]
fn apply_then_recover() {
    let plan = tmp("tree-plan.json");
    let graph = tmp("tree.txt");
    let xfile = tmp("x.csv");
    let yfile = tmp("y.csv");
    let result = tmp("result.json");

    assert!(gsr()
        .args(["graph", "gen", "--family", "tree", "--n", "20", "--seed", "3", "--out"])
        .arg(&graph)
        .status()
        .unwrap()
        .success());
    assert!(gsr()
        .args(["construct", "--method", "tree", "--graph"])
        .arg(&graph)
        .args(["--k", "1", "--seed", "3", "--out"])
        .arg(&plan)
        .status()
        .unwrap()
        .success());

    std::fs::write(&xfile, "7,2.5\n").unwrap();
    assert!(gsr()
        .args(["apply", "--plan"])
        .arg(&plan)
        .arg("--x")
        .arg(&xfile)
        .arg("--out")
        .arg(&yfile)
        .status()
        .unwrap()
        .success());

    let out = gsr()
        .args(["recover", "--plan"])
        .arg(&plan)
        .arg("--y")
        .arg(&yfile)
        .arg("--out")
        .arg(&result)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&result).unwrap()).unwrap();
    let entries = report["x_recovered"]["entries"].as_object().unwrap();
    let v = entries["7"].as_f64().unwrap();
    assert!((v - 2.5).abs() < 1e-6, "recovered {v}");
}

#[test]
fn infeasible_plan_fails_verification_with_exit_5() {
    let graph = tmp("line.txt");
    let plan = tmp("badplan.json");
    assert!(gsr()
        .args(["graph", "gen", "--family", "line", "--n", "4", "--out"])
        .arg(&graph)
        .status()
        .unwrap()
        .success());
    // Plan for the complete graph: row {0,2} is not connected on the line.
    assert!(gsr()
        .args(["construct", "--method", "complete", "--n", "4", "--k", "1", "--out"])
        .arg(&plan)
        .status()
        .unwrap()
        .success());
    let status = gsr()
        .args(["verify", "--plan"])
        .arg(&plan)
        .arg("--graph")
        .arg(&graph)
        .args(["--k", "1"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(5));
}

#[test]
fn bad_parameters_exit_4_and_missing_file_exit_3() {
    let status = gsr()
        .args(["construct", "--method", "g4", "--n", "3", "--k", "1", "--out", "/tmp/never.json"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(4));

    let status = gsr()
        .args(["graph", "info", "--graph", "/nonexistent/graph.txt"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn experiment_smoke_under_ten_seconds() {
    let out_csv = tmp("fig7.csv");
    let cfgfile = tmp("fig7.json");
    std::fs::write(&cfgfile, r#"{"n_list": [64], "m_list": [1], "trials": 5}"#).unwrap();
    let start = std::time::Instant::now();
    let out = gsr()
        .args(["experiment", "fig7", "--config"])
        .arg(&cfgfile)
        .args(["--seed", "2", "--out"])
        .arg(&out_csv)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(start.elapsed().as_secs() < 10, "smoke run too slow");
    let text = std::fs::read_to_string(&out_csv).unwrap();
    assert!(text.starts_with("n,m,mean_measurements"));
    assert_eq!(text.lines().count(), 2);
}
