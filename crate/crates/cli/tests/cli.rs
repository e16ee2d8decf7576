use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }
}

fn run(args: &[&str]) -> Run {
    let Output { status, stdout, stderr } = Command::new(env!("CARGO_BIN_EXE_tits-cert")).args(args).output().unwrap();
    Run {
        code: status.code().expect("exited normally"),
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let p: PathBuf = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn sl2(dir: &TempDir, name: &str, m: [f64; 4]) -> String {
    write(dir, name, &format!(r#"{{"model":"sl2-real","matrix":[[{},{}],[{},{}]]}}"#, m[0], m[1], m[2], m[3]))
}

#[test]
fn classify_diagonal() {
    let d = TempDir::new().unwrap();
    let e = std::f64::consts::E;
    let g = sl2(&d, "g.json", [e, 0.0, 0.0, 1.0 / e]);
    let r = run(&["classify", "--in", &g]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert_eq!(v["kind"], "hyperbolic");
    assert!((v["tau"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(v["model"], "sl2-real");
}

#[test]
fn constants_table() {
    let r = run(&["constants", "--eps", "0.1", "--n", "2"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json()["N_case1"], 2957);
    assert!(r.stdout.contains("\"N_case1\": 2957"));
}

#[test]
fn constants_from_config_with_override() {
    let d = TempDir::new().unwrap();
    let cfg = write(&d, "c.json", r#"{"eps": 0.5, "L": 30.0}"#);
    let v = run(&["constants", "--config", &cfg, "--eps", "0.1"]).json();
    assert_eq!(v["config"]["eps"], 0.1);
    assert_eq!(v["config"]["ltg"]["L"], 30.0);
}

#[test]
fn tube_of_small_translation() {
    let d = TempDir::new().unwrap();
    let (a, b) = ((0.002f64).exp(), (-0.002f64).exp());
    let g = sl2(&d, "g.json", [a, 0.0, 0.0, b]);
    let r = run(&["tube", "--in", &g, "--eps", "0.1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert_eq!(v["kind"], "hyperbolic-tube");
    assert_eq!(v["m_g"], 2);
}

#[test]
fn certify_sanov_and_verify() {
    let d = TempDir::new().unwrap();
    let f = sl2(&d, "a.json", [1.0, 2.0, 0.0, 1.0]);
    let g = sl2(&d, "b.json", [1.0, 0.0, 2.0, 1.0]);
    let out = d.path().join("cert.json");
    let r = run(&["certify", "--f", &f, "--g", &g, "--oracle-depth", "6", "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.is_empty());
    let text = fs::read_to_string(&out).unwrap();
    let cert: Value = serde_json::from_str(&text).unwrap();
    assert_eq!((cert["case"].as_u64(), cert["N"].as_u64()), (Some(2), Some(1)));
    assert_eq!(cert["status"], "verified");

    let r = run(&["verify-cert", "--in", out.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.json()["consistent"], true);

    // a tampered copy is reported with exit 2
    let mut bad = cert;
    bad["h_word_length"] = 3.into();
    let bad_path = write(&d, "bad.json", &bad.to_string());
    let r = run(&["verify-cert", "--in", &bad_path]);
    assert_eq!(r.code, 2);
    assert_eq!(r.json()["mismatches"][0], "h_word_length");
}

#[test]
fn certify_is_deterministic() {
    let d = TempDir::new().unwrap();
    let f = sl2(&d, "f.json", [std::f64::consts::E, 0.0, 0.0, 1.0 / std::f64::consts::E]);
    let (c, s) = (4f64.cosh(), 4f64.sinh());
    let conj = write(
        &d,
        "g.json",
        &format!(
            r#"{{"home": {{"model":"sl2-real","matrix":[[{},0],[0,{}]]}}, "conjugator": {{"model":"sl2-real","matrix":[[{c},{s}],[{s},{c}]]}}}}"#,
            std::f64::consts::E,
            1.0 / std::f64::consts::E
        ),
    );
    let args = ["certify", "--f", &f, "--g", &conj, "--oracle-depth", "4", "--orbit-depth", "3"];
    let (r1, r2) = (run(&args), run(&args));
    assert_eq!(r1.code, 0, "{}", r1.stderr);
    assert_eq!(r1.stdout, r2.stdout);
    assert_eq!(r1.json()["case"], 1);
}

#[test]
fn oracle_finds_relation_and_refutes_freeness_claim() {
    let d = TempDir::new().unwrap();
    let a = sl2(&d, "a.json", [1.0, 1.0, 0.0, 1.0]);
    let b = sl2(&d, "b.json", [1.0, 0.0, -2.0, 1.0]);
    let r = run(&["oracle", "--a", &a, "--b", &b, "--depth", "4"]);
    assert_eq!(r.code, 0);
    let v = r.json();
    assert_eq!((v["result"].as_str(), v["word"].as_str()), (Some("relation"), Some("abab")));
    let r = run(&["oracle", "--a", &a, "--b", &b, "--depth", "4", "--expect-free"]);
    assert_eq!(r.code, 3);
    assert_eq!(r.json()["word"], "abab");
}

#[test]
fn oracle_sanov_is_free() {
    let d = TempDir::new().unwrap();
    let a = sl2(&d, "a.json", [1.0, 2.0, 0.0, 1.0]);
    let b = sl2(&d, "b.json", [1.0, 0.0, 2.0, 1.0]);
    let r = run(&["oracle", "--a", &a, "--b", &b, "--depth", "6", "--expect-free"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json()["result"], "no-relation");
}

#[test]
fn propcheck_reports() {
    let r = run(&["propcheck", "--suite", "decrease-speed", "--samples", "500", "--seed", "3"]);
    assert_eq!(r.code, 0);
    let v = r.json();
    assert_eq!((v["violations"].as_u64(), v["passed"].as_bool()), (Some(0), Some(true)));
    assert_eq!(run(&["propcheck", "--suite", "decrease-speed", "--samples", "500", "--seed", "3"]).stdout, r.stdout);

    let r = run(&["propcheck", "--suite", "ra-triangle", "--samples", "0"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json()["worst_margin"], Value::Null);
}

#[test]
fn typed_errors_exit_two() {
    let d = TempDir::new().unwrap();
    let rot = sl2(&d, "e.json", [0.0, -1.0, 1.0, 0.0]);
    let par = sl2(&d, "p.json", [1.0, 1.0, 0.0, 1.0]);
    let r = run(&["certify", "--f", &rot, "--g", &par]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.is_empty());
    let err: Value = serde_json::from_str(r.stderr.trim()).unwrap();
    assert_eq!(err["error"], "EllipticInput");

    let r = run(&["propcheck", "--suite", "nope"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("UnknownSuite"));

    let junk = write(&d, "junk.json", "{not json");
    let r = run(&["classify", "--in", &junk]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("Parse"));

    let r = run(&["oracle", "--a", &par, "--b", &par, "--depth", "0"]);
    assert_eq!(r.code, 2);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["frobnicate"]).code, 1);
    assert_eq!(run(&["classify"]).code, 1);
    assert_eq!(run(&["constants", "--eps", "abc"]).code, 1);
    let r = run(&["classify", "--in", "/nonexistent/g.json"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("cannot read"));
    assert_eq!(run(&["--help"]).code, 0);
}
