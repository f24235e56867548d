use std::path::Path;
use std::process::{Command, Output};

fn lclab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lclab")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, json).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn spectral_gap_example_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "gap.json",
        r#"{"experiment": "spectral_gap_fd",
            "measure": {"kind": "Interval", "params": {"a": 0.0, "b": 3.141592653589793}},
            "params": {"grid": 10000}}"#,
    );
    let out = dir.path().join("out");
    let o = lclab(&["spectral_gap_fd", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["results.csv", "assertions.csv", "report.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["config"]["experiment"], "spectral_gap_fd");
}

#[test]
fn monge_six_atoms_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "m.json", r#"{"experiment": "monge_duality", "params": {"atoms": 6}, "seed": 4}"#);
    let o = lclab(&["monge_duality", "--config", &cfg, "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["passed"], true);
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "t.json", r#"{"experiment": "tilt_law_check", "params": {"paths": 2000, "dt": 0.01}}"#);
    let run = |sub: &str, seed: &str| {
        let out = dir.path().join(sub);
        let o = lclab(&["tilt_law_check", "--config", &cfg, "--seed", seed, "--out", out.to_str().unwrap()]);
        assert!(matches!(o.status.code(), Some(0 | 1)), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out.join("results.csv")).unwrap()
    };
    let a = run("a", "11");
    assert_eq!(a, run("b", "11"));
    assert_ne!(a, run("c", "12"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(lclab(&["no_such_experiment"]).status.code(), Some(2));
    assert_eq!(lclab(&["cheeger", "--grid", "3"]).status.code(), Some(2));

    let bad = write_config(dir.path(), "bad.json", r#"{"experiment": "cheeger", "params": "#);
    assert_eq!(lclab(&["cheeger", "--config", &bad]).status.code(), Some(2));

    let unknown = write_config(dir.path(), "u.json", r#"{"experiment": "cheeger", "params": {"gird": 10}}"#);
    assert_eq!(lclab(&["cheeger", "--config", &unknown]).status.code(), Some(2));

    let other = write_config(dir.path(), "o.json", r#"{"experiment": "localize"}"#);
    assert_eq!(lclab(&["cheeger", "--config", &other]).status.code(), Some(2));

    assert_eq!(lclab(&["cheeger", "--config", dir.path().join("missing.json").to_str().unwrap()]).status.code(), Some(2));

    // a regular file where the output directory should go
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, b"x").unwrap();
    let out = blocker.join("out");
    let o = lclab(&["spectral_gap_fd", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn list_names_every_experiment() {
    let o = lclab(&["list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 18);
    assert!(text.lines().any(|l| l.starts_with("hessian_ball")));
}

#[test]
fn quick_verify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out = dir.path().join(sub);
        let o = lclab(&["verify-all", "--quick", "--seed", "7", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out.join("verify.csv")).unwrap()
    };
    assert_eq!(run("a"), run("b"));
}
