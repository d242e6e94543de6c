//! End-to-end tests running the compiled binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pmvc"))
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout_line(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert_eq!(text.lines().count(), 1, "reports are single-line JSON");
    serde_json::from_str(text.trim()).unwrap()
}

const K2: &str = r#"{"n":2,"d":2,"edges":[[1,2,1,1]]}"#;
const TRIANGLE: &str = r#"{"n":3,"d":2,"edges":[[1,2,1,1],[2,3,1,1],[1,3,1,1]]}"#;
const C4: &str = r#"{"n":4,"d":2,"edges":[[1,2,1,1],[2,3,2,2],[3,4,1,1],[4,1,2,2]]}"#;
const RED2: &str = r#"{"type":"count_eq","color":1,"k":2}"#;
const RED4: &str = r#"{"type":"count_eq","color":1,"k":4}"#;
const C4_EMBEDDING: &str = r#"{"rotation":[[2,4],[3,1],[4,2],[1,3]]}"#;

#[test]
fn solve_sym_dp_yes_with_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", K2);
    let c = write(dir.path(), "c.json", RED2);
    let out = run(&[
        "solve-sym",
        "--graph",
        g.to_str().unwrap(),
        "--constraint",
        c.to_str().unwrap(),
        "--method",
        "dp",
    ]);
    let report = stdout_line(&out);
    assert_eq!(report["answer"], "yes");
    assert_eq!(report["verified"], true);
    assert_eq!(report["certificate"], serde_json::json!([0]));
}

#[test]
fn solve_sym_pit_no_on_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", TRIANGLE);
    let c = write(dir.path(), "c.json", RED2);
    let out = run(&[
        "solve-sym",
        "--graph",
        g.to_str().unwrap(),
        "--constraint",
        c.to_str().unwrap(),
        "--method",
        "pit",
        "--seed",
        "1",
    ]);
    let report = stdout_line(&out);
    assert_eq!(report["answer"], "no");
    assert_eq!(report["seed"], 1);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", C4);
    let c = write(dir.path(), "c.json", RED4);
    for method in ["pit", "dp", "oracle", "explicit"] {
        let args = [
            "solve-sym",
            "--graph",
            g.to_str().unwrap(),
            "--constraint",
            c.to_str().unwrap(),
            "--method",
            method,
            "--seed",
            "42",
        ];
        let first = run(&args);
        let second = run(&args);
        assert!(first.status.success());
        assert_eq!(first.stdout, second.stdout, "method {method}");
    }
}

#[test]
fn methods_agree_on_the_alternating_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", C4);
    let c = write(dir.path(), "c.json", RED4);
    let emb = write(dir.path(), "emb.json", C4_EMBEDDING);
    for (method, extra) in [
        ("pit", vec![]),
        ("dp", vec![]),
        ("oracle", vec![]),
        ("explicit", vec![]),
        ("planar", vec!["--embedding", emb.to_str().unwrap()]),
    ] {
        let mut args = vec![
            "solve-sym",
            "--graph",
            g.to_str().unwrap(),
            "--constraint",
            c.to_str().unwrap(),
            "--method",
            method,
        ];
        args.extend(extra);
        let report = stdout_line(&run(&args));
        assert_eq!(report["answer"], "yes", "method {method}");
        assert_eq!(report["verified"], true, "method {method}");
        assert_eq!(report["certificate"], serde_json::json!([0, 2]));
    }
}

#[test]
fn unknown_stays_unverified_on_cross_term() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", C4);
    let c = write(dir.path(), "c.json", RED2);
    let out = run(&[
        "solve-sym",
        "--graph",
        g.to_str().unwrap(),
        "--constraint",
        c.to_str().unwrap(),
        "--method",
        "pit",
        "--seed",
        "3",
    ]);
    let report = stdout_line(&out);
    assert_eq!(report["answer"], "unknown");
    assert_eq!(report["verified"], false);
    assert!(report.get("certificate").is_none());
}

#[test]
fn no_verify_downgrades_to_unknown() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", K2);
    let c = write(dir.path(), "c.json", RED2);
    let out = run(&[
        "solve-sym",
        "--graph",
        g.to_str().unwrap(),
        "--constraint",
        c.to_str().unwrap(),
        "--method",
        "pit",
        "--no-verify",
    ]);
    let report = stdout_line(&out);
    assert_eq!(report["answer"], "unknown");
    assert_eq!(report["verified"], false);
}

#[test]
fn extract_sym_returns_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", C4);
    let c = write(dir.path(), "c.json", RED4);
    let out = run(&[
        "extract-sym",
        "--graph",
        g.to_str().unwrap(),
        "--constraint",
        c.to_str().unwrap(),
        "--seed",
        "9",
    ]);
    let report = stdout_line(&out);
    assert_eq!(report["answer"], "yes");
    assert_eq!(report["certificate"], serde_json::json!([0, 2]));
}

#[test]
fn extract_sym_round_cap_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", C4);
    let c = write(dir.path(), "c.json", RED2);
    let out = run(&[
        "extract-sym",
        "--graph",
        g.to_str().unwrap(),
        "--constraint",
        c.to_str().unwrap(),
        "--rounds",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8(out.stdout).unwrap();
    let report: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(report["answer"], "unknown");
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"n":2,"d":2,"edges":[[1,1,1,1]]}"#);
    let c = write(dir.path(), "c.json", RED2);
    let out = run(&[
        "solve-sym",
        "--graph",
        bad.to_str().unwrap(),
        "--constraint",
        c.to_str().unwrap(),
        "--method",
        "dp",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("self-loop"));

    let missing = run(&["solve-sym", "--graph", "/nonexistent", "--constraint", "/nonexistent", "--method", "dp"]);
    assert_eq!(missing.status.code(), Some(2));

    // clap usage errors also exit 2.
    let usage = run(&["solve-sym"]);
    assert_eq!(usage.status.code(), Some(2));
}

#[test]
fn oracle_size_limit_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", r#"{"n":16,"d":1,"edges":[]}"#);
    let out = run(&["oracle", "enumerate", "--graph", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reduce_sat3_writes_instance_files() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = write(dir.path(), "f.cnf", "p cnf 2 2\n1 -2 0\n-1 2 0\n");
    let prefix = dir.path().join("out");
    let out = run(&[
        "reduce",
        "sat3",
        "--cnf",
        cnf.to_str().unwrap(),
        "--out-prefix",
        prefix.to_str().unwrap(),
    ]);
    let summary = stdout_line(&out);
    assert_eq!(summary["vertices"], 12);
    assert_eq!(summary["clauses"], 2);
    let graph = summary["graph"].as_str().unwrap();
    let dd = summary["dd"].as_str().unwrap();
    assert!(dir.path().join("out.gadgets.json").exists());

    let solved = run(&["solve-dd", "--graph", graph, "--dd", dd, "--method", "oracle"]);
    let report = stdout_line(&solved);
    assert_eq!(report["answer"], "yes");
}

#[test]
fn reduce_xpm_writes_constraint() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(
        dir.path(),
        "g.json",
        r#"{"n":4,"d":2,"edges":[[1,2,1,1],[3,4,2,2],[1,3,1,1],[2,4,2,2]]}"#,
    );
    let prefix = dir.path().join("xpm");
    let out = run(&[
        "reduce",
        "xpm",
        "--graph",
        g.to_str().unwrap(),
        "--k",
        "1",
        "--out-prefix",
        prefix.to_str().unwrap(),
    ]);
    let summary = stdout_line(&out);
    let constraint = std::fs::read_to_string(summary["constraint"].as_str().unwrap()).unwrap();
    assert_eq!(constraint, r#"{"type":"count_eq","color":1,"k":2}"#);
}

#[test]
fn from_circuit_emits_graph_and_constraint() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = write(
        dir.path(),
        "circ.json",
        r#"{"paths":4,"modes":2,"crystals":[{"a":1,"b":2,"ma":1,"mb":1,"amp":0.5},{"a":3,"b":4,"ma":2,"mb":2}]}"#,
    );
    let prefix = dir.path().join("qc");
    let out = run(&[
        "from-circuit",
        "--circuit",
        circuit.to_str().unwrap(),
        "--state",
        "ghz",
        "--out-prefix",
        prefix.to_str().unwrap(),
    ]);
    let summary = stdout_line(&out);
    assert_eq!(summary["vertices"], 4);
    assert_eq!(summary["edges"], 2);
    // Amplitudes are echoed untouched in the circuit copy.
    let echoed = std::fs::read_to_string(summary["circuit"].as_str().unwrap()).unwrap();
    assert!(echoed.contains("\"amp\":0.5"));
    let constraint = std::fs::read_to_string(summary["constraint"].as_str().unwrap()).unwrap();
    assert!(constraint.contains("count_eq"));

    // The emitted instance is solvable directly.
    let solved = run(&[
        "solve-sym",
        "--graph",
        summary["graph"].as_str().unwrap(),
        "--constraint",
        summary["constraint"].as_str().unwrap(),
        "--method",
        "oracle",
    ]);
    let report = stdout_line(&solved);
    assert_eq!(report["answer"], "no");
}

#[test]
fn oracle_enumerate_lists_matchings() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", C4);
    let out = run(&["oracle", "enumerate", "--graph", g.to_str().unwrap()]);
    let summary = stdout_line(&out);
    assert_eq!(summary["count"], 2);
    assert_eq!(summary["matchings"][0]["edges"], serde_json::json!([0, 2]));
    assert_eq!(summary["matchings"][0]["coloring"], serde_json::json!([1, 1, 1, 1]));
}
