use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn relaxmatch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relaxmatch")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn sweep_outputs(kind: &str, config: &str, jobs: &str, dir: &Path, tag: &str) -> (Vec<u8>, Vec<u8>) {
    let csv = dir.join(format!("{tag}.csv"));
    let out = relaxmatch(&[
        "experiment",
        kind,
        "--config",
        config,
        "--out",
        csv.to_str().unwrap(),
        "--rng-seed",
        "11",
        "--jobs",
        jobs,
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trials = dir.join(format!("{tag}.csv.trials.csv"));
    (fs::read(csv).unwrap(), fs::read(trials).unwrap())
}

#[test]
fn experiment_csv_is_byte_identical_across_runs_and_threads() {
    let dir = TempDir::new().unwrap();
    let noise = write(
        dir.path(),
        "noise.json",
        r#"{"n_min": 5, "n_max": 8, "graphs": 6, "multipliers": [0.0, 1.0, 4.0]}"#,
    );
    let seed = write(
        dir.path(),
        "seed.json",
        r#"{"families": [{"n": 6, "l": 1}, {"n": 8, "l": 3}], "ratios": [0.0, 1.0], "trials": 4}"#,
    );
    for (kind, config) in [("noise-sweep", &noise), ("seed-sweep", &seed)] {
        let first = sweep_outputs(kind, config, "1", dir.path(), &format!("{kind}-a"));
        let again = sweep_outputs(kind, config, "1", dir.path(), &format!("{kind}-b"));
        let threaded = sweep_outputs(kind, config, "4", dir.path(), &format!("{kind}-c"));
        assert_eq!(first, again, "{kind}");
        assert_eq!(first, threaded, "{kind}");
        assert!(first.0.starts_with(b"# relaxmatch-csv v1\n"));
        assert!(first.1.starts_with(b"# relaxmatch-csv v1\n"));
    }
}

#[test]
fn generated_graph_matches_its_relabeling() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let out = relaxmatch(&["gen", "friendly", "--n", "6", "--seed", "4", "--out", a.to_str().unwrap()]);
    assert!(out.status.success());
    let g: serde_json::Value = serde_json::from_str(&fs::read_to_string(&a).unwrap()).unwrap();
    let w = g["weights"].as_array().unwrap();
    // Reverse the vertex order.
    let rev: Vec<Vec<f64>> = (0..6)
        .map(|i| (0..6).map(|j| w[5 - i][5 - j].as_f64().unwrap()).collect())
        .collect();
    let b = write(dir.path(), "b.json", &serde_json::json!({"n": 6, "weights": rev}).to_string());
    let m = stdout_json(&relaxmatch(&["match", a.to_str().unwrap(), &b, "--brief", "--strict"]));
    assert_eq!(m["verdict"], "exact_isomorphism");
    assert_eq!(m["perm"], serde_json::json!([5, 4, 3, 2, 1, 0]));
    assert!(m["relaxed"].get("p").is_none());

    let report = stdout_json(&relaxmatch(&["analyze", a.to_str().unwrap()]));
    assert_eq!(report["is_friendly"], true);
    let bound = stdout_json(&relaxmatch(&["bound", a.to_str().unwrap()]));
    assert!(bound["theorem3"]["rho_max"].as_f64().unwrap() > 0.0);
    let oracle = stdout_json(&relaxmatch(&["oracle", a.to_str().unwrap(), &b]));
    assert_eq!(oracle["isomorphisms"], serde_json::json!([[5, 4, 3, 2, 1, 0]]));
}

#[test]
fn bound_from_explicit_margins() {
    let v = stdout_json(&relaxmatch(&["bound", "--eps", "1", "--delta", "1", "--n", "2"]));
    let rho = v["theorem3"]["rho_max"].as_f64().unwrap();
    assert!((rho - 1.0 / (24.0 * 2f64.sqrt())).abs() < 1e-15);
}

#[test]
fn seeded_certificate_on_the_path() {
    let dir = TempDir::new().unwrap();
    let p3 = write(dir.path(), "p3.json", r#"{"n": 3, "edges": [[0, 1, 1.0], [1, 2, 1.0]]}"#);
    let end = write(dir.path(), "end.json", "[[1.0], [0.0], [0.0]]");
    let mid = write(dir.path(), "mid.json", "[[0.0], [1.0], [0.0]]");
    let unseeded = stdout_json(&relaxmatch(&["certify", &p3]));
    assert_eq!(unseeded["certificate"]["full_rank"], false);
    let good = stdout_json(&relaxmatch(&["certify", &p3, "--seeds", &end]));
    assert_eq!(good["certificate"]["full_rank"], true);
    assert_eq!(good["seed_conditions"]["pass"], true);
    let bad = stdout_json(&relaxmatch(&["certify", &p3, "--seeds", &mid]));
    assert_eq!(bad["seed_conditions"]["pass"], false);
}

#[test]
fn exit_statuses() {
    let dir = TempDir::new().unwrap();
    let p3 = write(dir.path(), "p3.json", r#"{"n": 3, "edges": [[0, 1, 1.0], [1, 2, 1.0]]}"#);
    let asym = write(dir.path(), "asym.json", r#"{"n": 2, "weights": [[0.0, 1.0], [2.0, 0.0]]}"#);
    let garbage = write(dir.path(), "garbage.json", "not json");

    assert_eq!(relaxmatch(&["match", &p3, &p3]).status.code(), Some(0));
    assert_eq!(relaxmatch(&["match", &p3, &p3, "--strict"]).status.code(), Some(4));
    assert_eq!(relaxmatch(&["analyze", &asym]).status.code(), Some(2));
    assert_eq!(relaxmatch(&["analyze", &garbage]).status.code(), Some(2));
    assert_eq!(relaxmatch(&["analyze", "/nonexistent/graph.json"]).status.code(), Some(2));
    assert_eq!(relaxmatch(&["match", &p3, &p3, "--set", "bogus=1"]).status.code(), Some(2));
    assert_eq!(relaxmatch(&["gen", "symmetric", "--n", "4", "--l", "2"]).status.code(), Some(2));
    assert_eq!(relaxmatch(&["oracle", &p3, &asym]).status.code(), Some(2));
}
