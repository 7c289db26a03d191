use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tvconv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tvconv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn materialize(dir: &Path, name: &str, extra: &[&str]) -> String {
    let path = dir.join(format!("{name}.chain"));
    let p = path.to_str().unwrap().to_string();
    let mut args = vec!["fixtures", name, "--out", &p];
    args.extend_from_slice(extra);
    let o = tvconv(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    p
}

#[test]
fn analyze_peri() {
    let dir = tempfile::tempdir().unwrap();
    let path = materialize(dir.path(), "peri", &[]);
    let o = tvconv(&["analyze", &path]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("periodicity: 2-periodic {0} {1}"));
    assert!(text.contains("A3   [3] false"));
    assert!(text.contains("fails at pair (0,1)"));
    assert!(text.contains("audit: clean"));
    for line in text.lines().filter(|l| l.contains(" [1] ") || l.contains(" [2] ") || l.contains(" [3] ")) {
        assert!(line.contains(" false "), "{line}");
    }
}

#[test]
fn analyze_two_ipm_chain_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("two.chain");
    fs::write(&path, "states: a b c\na -> a : 1\nb -> b : 0.5\nb -> c : 0.5\nc -> b : 1\n").unwrap();
    let o = tvconv(&["analyze", path.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["ipms"].as_array().unwrap().len(), 2);
    assert_eq!(doc["mu_default"], true);
    let p2 = doc["reports"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["condition"] == "P2")
        .unwrap();
    assert_eq!(p2["holds"], false);
    assert!(doc["audit"]["violations"].as_array().unwrap().is_empty());
}

#[test]
fn malformed_file_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.chain");
    fs::write(&path, "states: a b\na -> b : 1\nb -> a : one\n").unwrap();
    let o = tvconv(&["analyze", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn tv_curve_standard() {
    let dir = tempfile::tempdir().unwrap();
    let path = materialize(dir.path(), "standard", &["--truncation", "60"]);
    let o = tvconv(&["tv-curve", &path, "--state", "3", "--n-max", "200"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,tv"));
    let rows: Vec<(usize, f64)> = lines
        .map(|l| {
            let (n, v) = l.split_once(',').unwrap();
            (n.parse().unwrap(), v.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 201);
    let (n, v) = *rows.last().unwrap();
    assert_eq!(n, 200);
    assert!((v - 0.875).abs() < 1e-3);
    // Deterministic formatting.
    assert_eq!(stdout(&tvconv(&["tv-curve", &path, "--state", "3", "--n-max", "200"])), text);
}

#[test]
fn couple_peri_never_meets() {
    let dir = tempfile::tempdir().unwrap();
    let path = materialize(dir.path(), "peri", &[]);
    let o = tvconv(&["couple", &path, "--x", "0", "--y", "1", "--horizon", "1000", "--traces", "200"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("none,200"));
    assert!(text.contains("no meeting: 100.00%"));
}

#[test]
fn couple_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let path = materialize(dir.path(), "simple", &["--truncation", "8"]);
    let run = |seed: &str| stdout(&tvconv(&["couple", &path, "--x", "0", "--y", "5", "--traces", "300", "--seed", seed]));
    assert_eq!(run("4"), run("4"));
    assert!(run("4").contains("none,0"));
}

#[test]
fn verify_passes() {
    let o = tvconv(&["verify", "--instances", "500", "--max-states", "8", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("failing instances: 0"));
}

#[test]
fn fixtures_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["peri", "simple", "standard"] {
        let path = materialize(dir.path(), name, &[]);
        let text = fs::read_to_string(&path).unwrap();
        let file = tvconv::ChainSpecFile::parse(&text).unwrap();
        let (k, mu) = file.to_kernel(1e-9f64).unwrap();
        let f = tvconv::fixture::<f64>(name, tvconv::harness::default_truncation(name)).unwrap();
        assert_eq!(k, f.kernel);
        assert_eq!(mu.unwrap(), f.mu);
    }
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(tvconv(&["nonsense"]).status.code(), Some(1));
    assert_eq!(tvconv(&["fixtures", "unknown"]).status.code(), Some(1));
    assert_eq!(tvconv(&["verify", "--max-states", "0"]).status.code(), Some(1));
    assert_eq!(tvconv(&["--help"]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let path = materialize(dir.path(), "peri", &[]);
    assert_eq!(tvconv(&["tv-curve", &path, "--state", "zz"]).status.code(), Some(1));
}
