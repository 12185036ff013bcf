use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const CM: &str = r#"{"a":"0","b":"-2","c":"0","P":{"m":"2","n":"2","e":"1"}}"#;
const EXAMPLE: &str =
    r#"{"a":"-199","b":"-1","c":"0","P":{"m":"2809","n":"89623","e":"3"},"T":{"m":"0","n":"0","e":"1"}}"#;
const TORSION: &str = r#"{"a":"0","b":"-1","c":"0","P":{"m":"0","n":"0","e":"1"}}"#;

fn curve_file(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ellfermat"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_cm_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cm = curve_file(dir.path(), "cm.json", CM);
    let o = run(&["--json", "generate", "--curve", s(&cm), "--kmax", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let f: Vec<&str> = rows.iter().map(|r| r["F"].as_str().unwrap()).collect();
    assert_eq!(&f[..4], ["1", "2", "42", "1800542"]);
    assert_eq!(f[4], "31993857363758147445458302");
}

#[test]
fn kmax_zero_prints_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let cm = curve_file(dir.path(), "cm.json", CM);
    let o = run(&["generate", "--curve", s(&cm), "--kmax", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn bad_input_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let tor = curve_file(dir.path(), "t.json", TORSION);
    assert_eq!(run(&["generate", "--curve", s(&tor)]).status.code(), Some(2));
    let off = curve_file(
        dir.path(),
        "off.json",
        r#"{"a":"0","b":"-2","c":"0","P":{"m":"2","n":"3","e":"1"}}"#,
    );
    assert_eq!(run(&["generate", "--curve", s(&off)]).status.code(), Some(2));
    let ints = curve_file(
        dir.path(),
        "ints.json",
        r#"{"a":0,"b":-2,"c":0,"P":{"m":2,"n":2,"e":1}}"#,
    );
    assert_eq!(run(&["generate", "--curve", s(&ints)]).status.code(), Some(2));
    assert_eq!(run(&["generate"]).status.code(), Some(2));
}

#[test]
fn verify_coprime_and_tau() {
    let dir = tempfile::tempdir().unwrap();
    let cm = curve_file(dir.path(), "cm.json", CM);
    let ex = curve_file(dir.path(), "ex.json", EXAMPLE);
    assert_eq!(
        run(&["verify", "coprime", "--curve", s(&cm), "--kmax", "7"])
            .status
            .code(),
        Some(0)
    );
    let o = run(&["--json", "verify", "tau", "--curve", s(&ex), "--kmax", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    let tau: Vec<&str> = v["tau"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap())
        .collect();
    assert_eq!(tau, ["178", "2", "2", "2", "2", "2"]);
}

#[test]
fn primality_reports_failed_condition_with_4() {
    let dir = tempfile::tempdir().unwrap();
    let ex = curve_file(dir.path(), "ex.json", EXAMPLE);
    let o = run(&["--json", "primality", "--curve", s(&ex), "--kmax", "4"]);
    assert_eq!(o.status.code(), Some(4));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["witnesses"].as_array().unwrap().len(), 4);
}

#[test]
fn budget_exit_keeps_partial_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cm = curve_file(dir.path(), "cm.json", CM);
    let cache = dir.path().join("c.jsonl");
    let o = run(&[
        "--budget-digits",
        "50",
        "generate",
        "--curve",
        s(&cm),
        "--kmax",
        "8",
        "--cache",
        s(&cache),
    ]);
    assert_eq!(o.status.code(), Some(3));
    let kept = std::fs::read_to_string(&cache).unwrap();
    assert_eq!(kept.lines().count(), 5);
    // resuming with a larger budget finishes the job
    let o = run(&["generate", "--curve", s(&cm), "--kmax", "8", "--cache", s(&cache)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(&cache).unwrap().starts_with(&kept));
}

#[test]
fn cache_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cm = curve_file(dir.path(), "cm.json", CM);
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    run(&["generate", "--curve", s(&cm), "--kmax", "3", "--cache", s(&a)]);
    let first = run(&["generate", "--curve", s(&cm), "--kmax", "6", "--cache", s(&a)]);
    let second = run(&["generate", "--curve", s(&cm), "--kmax", "6", "--cache", s(&b)]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(first.stdout, second.stdout);
    // reading back from a full cache gives the same output again
    let third = run(&["generate", "--curve", s(&cm), "--kmax", "6", "--cache", s(&a)]);
    assert_eq!(third.stdout, first.stdout);
}

#[test]
fn corrupt_cache_exits_with_4() {
    let dir = tempfile::tempdir().unwrap();
    let cm = curve_file(dir.path(), "cm.json", CM);
    let c = dir.path().join("c.jsonl");
    run(&["generate", "--curve", s(&cm), "--kmax", "3", "--cache", s(&c)]);
    let mut text = std::fs::read_to_string(&c).unwrap();
    text = text.replace("\"F\":\"42\"", "\"F\":\"43\"");
    std::fs::write(&c, text).unwrap();
    assert_eq!(
        run(&["generate", "--curve", s(&cm), "--kmax", "3", "--cache", s(&c)])
            .status
            .code(),
        Some(4)
    );
}

#[test]
fn cm_subcommands() {
    let o = run(&["--json", "cm", "locate", "--prime", "65537"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["n"], 5);
    let o = run(&["--json", "cm", "trace", "--max-p", "30"]);
    assert_eq!(stdout(&o).lines().count(), 9);
    assert_eq!(run(&["cm", "audit", "--n", "4"]).status.code(), Some(0));
    assert_eq!(run(&["cm", "locate", "--prime", "7"]).status.code(), Some(2));
}
