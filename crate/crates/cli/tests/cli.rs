use std::process::{Command, Output};

fn snumber(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snumber"))
        .args(args)
        .env_remove("SNUMBER_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn secant_coefficients() {
    let o = snumber(&[
        "series",
        "coeff",
        "--reduced",
        "",
        "--parity",
        "odd",
        "--upto",
        "6",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1, 0, -1, 0, 5, 0, -61\n");
}

#[test]
fn quartic_invariance_report() {
    let o = snumber(&["invariance", "--type", "2,2;2,1,1"]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "invariant: true; s = 0; per-order raw counts: [2, 0]\n"
    );
}

#[test]
fn reduced_types_with_simple_values() {
    // four simple values at degree 5: the q^4 coefficient of sech
    let o = snumber(&["snumber", "--reduced", "", "--simple", "4"]);
    assert_eq!(stdout(&o), "5\n");
    let o = snumber(&["snumber", "--reduced", "1;1", "--degree", "3"]);
    assert_eq!(stdout(&o), "-1\n");
}

#[test]
fn exit_codes() {
    let invalid = snumber(&["snumber", "--type", "3,1;2,2"]);
    assert_eq!(invalid.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&invalid.stderr).contains("invalid type list"));
    assert_eq!(snumber(&["snumber"]).status.code(), Some(2));
    assert_eq!(
        snumber(&["snumber", "--type", "2", "--format", "dot"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(snumber(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(
        snumber(&["oracle", "dessins", "--type", "6"]).status.code(),
        Some(1)
    );
}

#[test]
fn cache_is_shared_across_orderings() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("s.jsonl");
    let c = cache.to_str().unwrap();
    let a = snumber(&["snumber", "--type", "3,1,1;2,2,1", "--cache", c]);
    let b = snumber(&[
        "snumber",
        "--type",
        "2,2,1;3,1,1",
        "--cache",
        c,
        "--mode",
        "explicit",
    ]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    let text = std::fs::read_to_string(&cache).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.contains("\"key\":\"5|2,2,1;3,1,1\""));
}

#[test]
fn output_independent_of_thread_count() {
    let args = [
        "dessins",
        "enumerate",
        "--type",
        "2,1,1,1;2,1,1,1;2,1,1,1;2,1,1,1",
        "--format",
        "json",
    ];
    let one = snumber(&[&args[..], &["--jobs", "1"]].concat());
    let many = snumber(&[&args[..], &["--jobs", "4"]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn out_file_and_dot_export() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.dot");
    let o = snumber(&[
        "export",
        "dot",
        "--type",
        "2,2;2,1,1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let dot = std::fs::read_to_string(&path).unwrap();
    assert_eq!(dot.matches("graph dessin").count(), 2);
    let t = snumber(&["export", "dot", "--tree", "b[]w[]"]);
    assert!(stdout(&t).starts_with("graph tree"));
}

#[test]
fn tree_and_oracle_commands() {
    let o = snumber(&["trees", "sum", "--black", "4,2,2", "--white", "2,2,1,1,1,1"]);
    assert_eq!(stdout(&o), "white: 2\nblack: 2\n");
    let o = snumber(&["oracle", "trees", "--edges", "4"]);
    assert!(stdout(&o).ends_with("total: 12\n"));
    let o = snumber(&["oracle", "euler", "--upto", "7", "--format", "csv"]);
    assert!(stdout(&o).ends_with("7,272\n"));
    let o = snumber(&["oracle", "dessins", "--type", "2,2;2,1,1"]);
    assert!(stdout(&o).starts_with("2 dessins"));
}

#[test]
fn series_fit_json_round_trips() {
    let o = snumber(&[
        "series",
        "fit",
        "--reduced",
        "2,2",
        "--parity",
        "odd",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["series"]["g_factor"], serde_json::Value::Bool(true));
    assert!(v["held_out"].as_array().unwrap().len() >= 2);
    let o = snumber(&["series", "leading", "--reduced", "2", "--parity", "even"]);
    assert_eq!(o.status.code(), Some(1));
}
