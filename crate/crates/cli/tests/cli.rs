use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_profinite"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn complete_integers() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("z.json");
    let o = run(&[
        "complete",
        "--source",
        "Z",
        "--bound",
        "10",
        "--json",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("invariant factors: [2520]"));
    let v = read_json(&out);
    assert_eq!(v["limit"]["invariant_factors"], serde_json::json!([2520]));
    assert_eq!(v["limit"]["order"], 2520);
    assert_eq!(v["projection"]["injective"], false);
    assert_eq!(v["projection"]["surjective"], true);
}

#[test]
fn complete_finite_sources() {
    let o = run(&["complete", "--source", "Z/6", "--bound", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("invariant factors: [6]"));
    assert!(s.contains("injective yes, surjective yes"));
    let o = run(&[
        "complete", "--source", "f2^2", "--bound", "4", "--mode", "full",
    ]);
    let s = stdout(&o);
    assert!(s.contains("invariant factors: [2, 2]"), "{s}");
    assert!(s.contains("injective yes, surjective yes"));
}

#[test]
fn json_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = run(&[
            "complete",
            "--source",
            "S3",
            "--bound",
            "6",
            "--mode",
            "full",
            "--elements",
            "--json",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn verify_suites() {
    let cases: &[&[&str]] = &[
        &["verify", "theorem", "--p", "2", "--dim", "2"],
        &["verify", "triangle", "--p", "3", "--dim", "1"],
        &["verify", "fact", "--p", "2", "--dim", "2"],
        &["verify", "classify", "--p", "2", "--dim", "2"],
        &["verify", "remark47", "--p", "2", "--dim", "3"],
        &["verify", "prop34", "--source", "Z/4", "--bound", "8"],
        &["verify", "iterate", "--source", "S3", "--depth", "2"],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stdout(&o));
        assert!(stdout(&o).starts_with("PASS"));
    }
}

#[test]
fn verify_perp_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("perp.json");
    let o = run(&[
        "verify",
        "perp",
        "--p",
        "2",
        "--dim",
        "3",
        "--json",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = read_json(&out);
    assert_eq!(v["status"], "pass");
    assert_eq!(
        v["witness"]["counts_by_dim"],
        serde_json::json!([1, 7, 7, 1])
    );
    assert_eq!(v["witness"]["bijection"], true);
}

#[test]
fn witness_tables() {
    let o = run(&["witness", "--p", "2", "--level", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let supports: Vec<usize> = stdout(&o)
        .lines()
        .skip(1)
        .take(9)
        .map(|l| l.split_whitespace().nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(supports, (1..=9).collect::<Vec<_>>());
    let o = run(&["witness", "--p", "3", "--level", "0"]);
    assert!(stdout(&o).lines().nth(1).unwrap().contains("  1  [0]"));
}

#[test]
fn diagram_dot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("z.dot");
    let o = run(&[
        "diagram",
        "--source",
        "Z",
        "--bound",
        "4",
        "--no-identities",
        "--dot",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        std::fs::read_to_string(&out).unwrap(),
        "digraph {\n  n0 [label=\"1\"];\n  n1 [label=\"Z/2\"];\n  n2 [label=\"Z/3\"];\n  n3 [label=\"Z/4\"];\n  n1 -> n0;\n  n2 -> n0;\n  n3 -> n0;\n  n3 -> n1;\n}\n"
    );
    let o = run(&[
        "diagram",
        "--source",
        "F2^1",
        "--bound",
        "2",
        "--no-identities",
    ]);
    assert_eq!(stdout(&o).matches("[label=").count(), 2);
    let o = run(&["diagram", "--source", "trivial", "--bound", "5"]);
    assert_eq!(stdout(&o).matches("[label=").count(), 1);
}

#[test]
fn errors_exit_two() {
    let o = run(&["complete", "--source", "Z/", "--bound", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(
        err.contains("position 2") && err.contains("expected a number"),
        "{err}"
    );
    assert_eq!(
        run(&["complete", "--source", "F4^1", "--bound", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(
        run(&["verify", "theorem", "--p", "2", "--dim", "2", "--bound", "2"])
            .status
            .code(),
        Some(2)
    );
}
