use std::process::Command;

use serde_json::Value;

fn qec(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qec"))
        .args(args)
        .env_remove("QEC_MATERIALIZE_LIMIT")
        .output()
        .expect("run qec");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap_or_else(|e| panic!("bad json {e}: {s}"))
}

#[test]
fn check_theorem_instance_passes() {
    let (code, out, _) = qec(&[
        "check", "--p", "7", "--d", "5", "--n", "3", "--mode", "sample", "--samples", "100000", "--seed", "42",
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["queries_checked"], 800_000);
    assert_eq!(v["seed"], 42);
    assert!(v.get("elapsed_ms").is_none());
}

#[test]
fn check_exhaustive_small_passes() {
    let (code, out, _) = qec(&["check", "--p", "7", "--d", "2", "--n", "1", "--mode", "exhaustive"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["verdict"], "pass");
}

#[test]
fn check_failure_exits_one_with_certificate() {
    let (code, out, _) = qec(&["check", "--p", "3", "--d", "1", "--n", "1"]);
    assert_eq!(code, 1);
    let v = json(&out);
    assert_eq!(v["verdict"], "fail");
    assert_eq!(v["certificate"]["pattern"], 0);
    assert_eq!(v["certificate"]["points"], serde_json::json!([0]));
}

#[test]
fn check_rejects_non_prime_p() {
    let (code, _, err) = qec(&["check", "--p", "4", "--d", "2", "--n", "1"]);
    assert_eq!(code, 2);
    assert!(err.contains("odd prime"), "{err}");
    // --m accepts composites
    let (code, _, _) = qec(&["check", "--m", "4", "--d", "2", "--n", "1"]);
    assert!(code == 0 || code == 1);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qec(&["check", "--d", "2", "--n", "1"]).0, 2);
    assert_eq!(qec(&["frobnicate"]).0, 2);
    assert_eq!(qec(&["check", "--p", "7", "--d", "2", "--n", "1", "--mode", "sample", "--samples", "0"]).0, 2);
}

#[test]
fn check_timing_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let (code, out, _) = qec(&[
        "check", "--p", "5", "--d", "2", "--n", "2", "--timing", "--output", path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let v = json(&std::fs::read_to_string(&path).unwrap());
    assert!(v["elapsed_ms"].is_u64());
}

#[test]
fn check_reports_identical_across_workers() {
    let base = ["check", "--p", "7", "--d", "3", "--n", "3", "--mode", "sample", "--samples", "2000", "--seed", "3"];
    let mut outs = Vec::new();
    for w in ["1", "8"] {
        let mut args = base.to_vec();
        args.extend(["--workers", w]);
        outs.push(qec(&args).1);
    }
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn oracle_only_graph_cannot_be_checked_exhaustively() {
    let (code, _, err) = qec(&["--materialize-limit", "10", "check", "--p", "7", "--d", "2", "--n", "1"]);
    assert_eq!(code, 2);
    assert!(err.contains("not materialized"));
    let out = Command::new(env!("CARGO_BIN_EXE_qec"))
        .args(["check", "--p", "7", "--d", "2", "--n", "1"])
        .env("QEC_MATERIALIZE_LIMIT", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn witness_independent_and_t_minus_one() {
    let (code, out, _) = qec(&[
        "witness", "--p", "7", "--d", "5", "--a", "0,0,0,0,0", "--b", "1,0,0,0,0", "--c", "0,1,0,0,0", "--pattern", "111",
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["verified"], true);
    for q in v["quadrances"].as_array().unwrap() {
        assert!(q.as_u64().unwrap() <= 3);
    }
    assert_eq!(v["plan"]["case"], "independent");

    let (code, out, _) = qec(&[
        "witness", "--p", "7", "--d", "5", "--a", "0,0,0,0,0", "--b", "1,0,0,0,0", "--c", "-1,0,0,0,0", "--pattern", "222",
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["plan"]["case"], "dependent");
    assert_eq!(v["plan"]["t"], 6);
    for q in v["quadrances"].as_array().unwrap() {
        assert!((4..=6).contains(&q.as_u64().unwrap()));
    }
}

#[test]
fn witness_rejects_duplicates_and_bad_patterns() {
    let dup = qec(&[
        "witness", "--p", "7", "--d", "5", "--a", "0,0,0,0,0", "--b", "0,0,0,0,0", "--c", "0,1,0,0,0", "--pattern", "111",
    ]);
    assert_eq!(dup.0, 2);
    let bad = qec(&[
        "witness", "--p", "7", "--d", "5", "--a", "0,0,0,0,0", "--b", "1,0,0,0,0", "--c", "0,1,0,0,0", "--pattern", "131",
    ]);
    assert_eq!(bad.0, 2);
    let short = qec(&[
        "witness", "--p", "7", "--d", "5", "--a", "0,0,0", "--b", "1,0,0,0,0", "--c", "0,1,0,0,0", "--pattern", "111",
    ]);
    assert_eq!(short.0, 2);
}

#[test]
fn spheres_table() {
    let (code, out, _) = qec(&["spheres", "--p", "7", "--d", "1"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["counts"], serde_json::json!([1, 2, 2, 0, 2, 0, 0]));
    assert_eq!(v["total"], 7);
    let (_, out, _) = qec(&["spheres", "--p", "7", "--d", "2"]);
    let v = json(&out);
    assert_eq!(v["counts"][1], 8);
    assert_eq!(v["degree"], 24);
}

#[test]
fn paley_check_outputs() {
    let (code, out, _) = qec(&["paley-check", "--p", "7"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["supported"], true);
    assert_eq!(v["isomorphic"], true);
    let (code, out, _) = qec(&["paley-check", "--p", "5"]);
    assert_eq!(code, 2);
    let v = json(&out);
    assert_eq!(v["supported"], false);
    assert!(v["isomorphic"].is_null());
}

#[test]
fn build_and_export() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("edges.txt");
    let (code, out, _) = qec(&["build", "--p", "3", "--d", "2", "--export", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["vertices"], 9);
    let degree = v["degree"].as_u64().unwrap();
    let edges = std::fs::read_to_string(&path).unwrap();
    assert_eq!(edges.lines().count() as u64, 9 * degree / 2);
    for line in edges.lines() {
        let ij: Vec<usize> = line.split(' ').map(|s| s.parse().unwrap()).collect();
        assert!(ij[0] < ij[1]);
    }
    let (code, out, _) = qec(&["build", "--m", "9", "--d", "2", "--edge-values", "1,4,7"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["edge_values"], serde_json::json!([1, 4, 7]));
}

#[test]
fn survey_json_and_csv() {
    let (code, out, _) = qec(&["survey", "--m", "7,9", "--d", "2,3", "--n", "3", "--samples", "500", "--seed", "1"]);
    assert_eq!(code, 0);
    let rows = json(&out);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r["mode"] == "exhaustive"));
    assert!(rows.iter().all(|r| r["within_theorem"] == false));

    let (code, out, _) = qec(&["survey", "--m", "7", "--d", "5", "--n", "3", "--samples", "1000", "--format", "csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "m,d,n,mode,samples,seed,verdict,queries_checked,pattern");
    assert!(lines[1].starts_with("7,5,3,sampled,1000,0,pass,8000"));
}
