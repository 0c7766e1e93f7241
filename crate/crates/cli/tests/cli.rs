use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const SCHEMA: &str = include_str!("../report.schema.json");

fn oddcox(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oddcox")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn system_file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn triangle(dir: &TempDir, m12: &str, m13: &str, m23: &str) -> PathBuf {
    system_file(
        dir,
        &format!("t{m12}_{m13}_{m23}.txt"),
        &format!("rank 3\nm 1 2 {m12}\nm 1 3 {m13}\nm 2 3 {m23}\n"),
    )
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Runs with `--json`, checks the report against the published schema and
/// returns it with the exit code.
fn json_report(args: &[&str]) -> (Value, i32) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = oddcox(&all);
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let schema: Value = serde_json::from_str(SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(&report).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}\n{report:#}");
    let code = out.status.code().unwrap();
    assert_eq!(code == 0, report["status"] == "ok");
    (report, code)
}

#[test]
fn classify_texts() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (
            triangle(&dir, "3", "5", "5"),
            "HAS finite-index reflection subgroup (type 3: (5,5,3) pattern) in component {1,2,3}\n",
        ),
        (
            triangle(&dir, "5", "5", "5"),
            "NO finite-index reflection subgroup: minimal forbidden subdiagram {1,2,3} labels (5,5,5)\n",
        ),
        (
            triangle(&dir, "7", "5", "3"),
            "NO finite-index reflection subgroup: minimal forbidden subdiagram {1,2,3} labels (7,5,3)\n",
        ),
        (
            triangle(&dir, "5", "5", "inf"),
            "NO finite-index reflection subgroup: minimal forbidden subdiagram {1,2,3} labels (5,5,inf)\n",
        ),
        (
            system_file(&dir, "free.txt", "rank 2\n"),
            "HAS finite-index reflection subgroup (type 1: component of order at most 2) in component {1}\n",
        ),
    ];
    for (path, expected) in cases {
        let out = oddcox(&["classify", s(&path)]);
        assert!(out.status.success());
        assert_eq!(stdout(&out), expected);
    }
}

#[test]
fn malformed_input_names_the_line() {
    let dir = TempDir::new().unwrap();
    let even = system_file(&dir, "even.txt", "rank 3\nm 1 2 3\nm 1 3 4\n");
    let out = oddcox(&["classify", s(&even)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));

    let junk = system_file(&dir, "junk.txt", "rank 3\nm 1 2 x\n");
    let out = oddcox(&["classify", s(&junk)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 2, column 7"), "{}", stderr(&out));

    let (report, code) = json_report(&["classify", s(&junk)]);
    assert_eq!(code, 1);
    assert_eq!(report["error"]["code"], 1);

    let missing = dir.path().join("missing.txt");
    assert_eq!(oddcox(&["classify", s(&missing)]).status.code(), Some(1));
}

#[test]
fn usage_errors() {
    assert_eq!(oddcox(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(oddcox(&["search"]).status.code(), Some(1));
    assert_eq!(oddcox(&["--help"]).status.code(), Some(0));
    let dir = TempDir::new().unwrap();
    let t = triangle(&dir, "3", "5", "5");
    let out = Command::new(env!("CARGO_BIN_EXE_oddcox"))
        .args(["classify", s(&t)])
        .env("ODDCOX_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn construct_then_verify() {
    let dir = TempDir::new().unwrap();
    for (m12, m13, m23, index) in [("3", "5", "5", 18), ("9", "5", "5", 54), ("3", "25", "35", 18), ("7", "3", "3", 21)] {
        let t = triangle(&dir, m12, m13, m23);
        let cert = dir.path().join(format!("c{m12}_{m13}_{m23}.txt"));
        let out = oddcox(&["construct", s(&t), "--out", s(&cert)]);
        assert!(out.status.success(), "{}", stderr(&out));
        assert!(stdout(&out).starts_with(&format!("certificate: index {index}, ")));
        let out = oddcox(&["verify", s(&t), s(&cert)]);
        assert!(out.status.success(), "{}{}", stdout(&out), stderr(&out));
        assert!(stdout(&out).starts_with(&format!("PASS: index {index}, ")), "{}", stdout(&out));
    }
    let t = triangle(&dir, "3", "5", "5");
    let cert = dir.path().join("c3_5_5.txt");
    let out = oddcox(&["verify", s(&t), s(&cert), "--radius", "10"]);
    assert!(stdout(&out).contains("tile the ball of radius 10"), "{}", stdout(&out));
}

#[test]
fn construct_prints_the_certificate_without_out() {
    let dir = TempDir::new().unwrap();
    let t = triangle(&dir, "3", "5", "5");
    let out = oddcox(&["construct", s(&t)]);
    let text = stdout(&out);
    assert!(text.contains("\nindex 18\nprovenance 553-rotation\ngenerators 9\n"), "{text}");
    let no = oddcox(&["construct", s(&triangle(&dir, "5", "5", "5"))]);
    assert_eq!(no.status.code(), Some(0));
    assert!(stdout(&no).starts_with("NO finite-index"));
}

#[test]
fn tampered_certificates_are_rejected() {
    let dir = TempDir::new().unwrap();
    let t = triangle(&dir, "3", "5", "5");
    let cert = dir.path().join("cert.txt");
    assert!(oddcox(&["construct", s(&t), "--out", s(&cert)]).status.success());
    let text = std::fs::read_to_string(&cert).unwrap();

    // drop the last chamber and fix up the counts so the file still parses
    let mut lines: Vec<&str> = text.lines().collect();
    lines.pop();
    let shorter = lines
        .join("\n")
        .replace("index 18", "index 17")
        .replace("chambers 18", "chambers 17");
    let bad = system_file(&dir, "short.txt", &shorter);
    let out = oddcox(&["verify", s(&t), s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("FAIL\n  "), "{}", stdout(&out));
    let (report, _) = json_report(&["verify", s(&t), s(&bad)]);
    assert_eq!(report["result"]["passed"], false);

    let wrong = triangle(&dir, "5", "5", "5");
    let out = oddcox(&["verify", s(&wrong), s(&cert)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("FAIL"));

    let garbled = system_file(&dir, "garbled.txt", &text.replace("provenance 553-rotation", "provenance guess"));
    let out = oddcox(&["verify", s(&t), s(&garbled)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line"), "{}", stderr(&out));
}

#[test]
fn search_outputs() {
    let dir = TempDir::new().unwrap();
    let out = oddcox(&["search", s(&triangle(&dir, "3", "5", "5")), "--max-size", "2"]);
    assert_eq!(stdout(&out), "none up to size 2 (complete)\n");
    let out = oddcox(&["search", s(&system_file(&dir, "free.txt", "rank 2\n")), "--max-size", "3"]);
    let text = stdout(&out);
    assert!(text.lines().any(|l| l == "{e, 1}"), "{text}");
    assert!(text.ends_with("5 Coxeter polytopes up to size 3 (complete)\n"), "{text}");
    let out = oddcox(&["search", s(&triangle(&dir, "3", "5", "5")), "--max-size", "18", "--budget", "50"]);
    assert!(stdout(&out).ends_with("(truncated)\n"), "{}", stdout(&out));
}

#[test]
fn render_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let t = triangle(&dir, "3", "5", "5");
    let cert = dir.path().join("cert.txt");
    assert!(oddcox(&["construct", s(&t), "--out", s(&cert)]).status.success());
    let a = dir.path().join("a.svg");
    let out = oddcox(&["render", s(&t), "--depth", "6", "--highlight", s(&cert), "--out", s(&a)]);
    assert_eq!(stdout(&out), format!("136 chambers drawn to {}\n", a.display()));
    let b = oddcox(&["render", s(&t), "--depth", "6", "--highlight", s(&cert)]);
    assert_eq!(std::fs::read_to_string(&a).unwrap(), stdout(&b).trim_end_matches('\n').to_string() + "\n");
    let wrong_rank = system_file(&dir, "r4.txt", "rank 4\n");
    assert_eq!(oddcox(&["render", s(&wrong_rank)]).status.code(), Some(1));
}

#[test]
fn every_command_matches_the_schema() {
    let dir = TempDir::new().unwrap();
    let t = triangle(&dir, "3", "5", "5");
    let f = triangle(&dir, "5", "5", "5");
    let cert = dir.path().join("cert.txt");
    let svg = dir.path().join("x.svg");

    let (r, _) = json_report(&["classify", s(&t)]);
    assert_eq!(r["result"]["verdict"]["answer"], "has-subgroup");
    assert_eq!(r["result"]["verdict"]["type"], 3);
    let (r, _) = json_report(&["classify", s(&f)]);
    assert_eq!(r["result"]["verdict"]["forbidden"][0]["labels"], "(5,5,5)");
    let (r, _) = json_report(&["construct", s(&t), "--out", s(&cert)]);
    assert_eq!(r["result"]["certificate"]["index"], 18);
    let (r, _) = json_report(&["construct", s(&f)]);
    assert!(r["result"]["certificate"].is_null());
    let (r, _) = json_report(&["verify", s(&t), s(&cert)]);
    assert_eq!(r["result"]["passed"], true);
    let (r, code) = json_report(&["verify", s(&f), s(&cert)]);
    assert_eq!((code, &r["result"]["passed"]), (1, &Value::Bool(false)));
    let (r, _) = json_report(&["search", s(&f), "--max-size", "5"]);
    assert_eq!(r["result"]["status"], "complete");
    let (r, _) = json_report(&["render", s(&t), "--depth", "3", "--out", s(&svg)]);
    assert_eq!(r["command"], "render");
    let (r, code) = json_report(&["render", s(&system_file(&dir, "r2.txt", "rank 2\n"))]);
    assert_eq!((code, &r["error"]["code"]), (1, &Value::from(1)));
}
