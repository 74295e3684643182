use std::path::Path;
use std::process::{Command, Output};

fn madbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_madbound"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn check_inequalities_exits_zero_without_violations() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = madbound(&["check-inequalities", "--trials", "2000", "--seed", "7", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = read_json(&dir.path().join("check-inequalities.json"));
    assert_eq!(report["report"]["violations"], 0);
    assert_eq!(report["meta"]["seed"], 7);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.lines().next().unwrap().starts_with("name"));
    for name in ["lemma2 ", "lemma1_variance", "lemma3_first"] {
        assert!(stdout.contains(name), "{name} missing from table");
    }
}

#[test]
fn literal_lemma3_bound_exits_two_with_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = madbound(&["check-inequalities", "--trials", "50", "--include-lemma3-literal", "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    let report = read_json(&dir.path().join("check-inequalities.json"));
    let lit = &report["report"]["lemma3_literal"];
    assert_eq!(lit["pinned"]["p"], serde_json::json!([0.7, 0.3]));
    assert_eq!(lit["pinned_literal_holds"], false);
    assert!((lit["pinned"]["max_mad"].as_f64().unwrap() - 0.48).abs() < 1e-12);
    assert!((lit["pinned"]["literal_bound"].as_f64().unwrap() - 0.4).abs() < 1e-12);
    assert_eq!(lit["adjusted_failures"], 0);
}

#[test]
fn tightness_search_with_zero_iterations_reports_one_instance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = madbound(&["tightness-search", "--space-size", "2", "--iterations", "0", "--seed", "1", "--out", out]);
    assert_eq!(o.status.code(), Some(0));
    let report = read_json(&dir.path().join("tightness-search.json"));
    assert_eq!(report["report"]["outcome"]["evaluations"], 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("P = "));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(madbound(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(madbound(&["frontier", "--beta", "abc"]).status.code(), Some(1));
    assert_eq!(madbound(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "seed = 1\n[frontier\n").unwrap();
    let o = madbound(&["kernel-constants", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let o = madbound(&["kernel-constants", "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn flags_override_config_and_unknown_keys_warn() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "seed = 42\ncolour = 1\n[rao-blackwell]\ntrials = 30\n").unwrap();
    let out = dir.path().join("o");
    let o = madbound(&[
        "rao-blackwell",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown config key `colour`"));
    let report = read_json(&out.join("rao-blackwell.json"));
    assert_eq!(report["meta"]["seed"], 7);
    assert_eq!(report["report"]["trials"], 30);
}

#[test]
fn emitted_config_reloads_to_identical_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a");
    let o = madbound(&[
        "gwn-experiment",
        "--replicates",
        "200",
        "--m",
        "128",
        "--seed",
        "5",
        "--format",
        "csv",
        "--out",
        first.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let emitted = first.join("gwn-experiment.config.toml");
    let second = dir.path().join("b");
    let o = madbound(&[
        "gwn-experiment",
        "--config",
        emitted.to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stderr.is_empty(), "{}", String::from_utf8_lossy(&o.stderr));
    let a = std::fs::read(first.join("gwn-experiment.csv")).unwrap();
    let b = std::fs::read(second.join("gwn-experiment.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn csv_outputs_embed_meta_and_seventeen_digits() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = madbound(&["kernel-constants", "--format", "csv", "--seed", "3", "--out", out]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("kernel-constants.csv")).unwrap();
    let mut lines = text.lines();
    let meta = lines.next().unwrap();
    assert!(meta.starts_with("# tool_version=") && meta.contains("config_hash=") && meta.contains("seed=3"));
    assert_eq!(lines.next(), Some("key,value"));
    let l2 = lines.nth(1).unwrap();
    assert_eq!(l2, "l2_norm_sq,9.8338081291272639e-1");
}
