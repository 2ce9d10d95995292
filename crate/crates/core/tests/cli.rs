use std::path::Path;
use std::process::{Command, Output};

fn rcae(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rcae"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn version_and_help() {
    let out = rcae(&["--version"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains(env!("CARGO_PKG_VERSION")));
    let out = rcae(&["--help"]);
    assert!(out.status.success());
    let help = String::from_utf8_lossy(&out.stdout);
    for sub in ["simulate", "replay", "compare"] {
        assert!(help.contains(sub));
    }
}

#[test]
fn usage_errors_exit_with_config_code() {
    assert_eq!(rcae(&[]).status.code(), Some(1));
    assert_eq!(rcae(&["simulate"]).status.code(), Some(1));
    assert_eq!(rcae(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn simulate_then_replay() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run.csv");
    let log = dir.path().join("log.csv");
    let out = rcae(&[
        "simulate", "--out", arg(&run), "--duration", "2", "--seed", "7", "--log-out", arg(&log),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&run).unwrap();
    assert_eq!(text.lines().count(), 201);
    assert!(text.starts_with("t,psi_true,theta_true,phi_true,psi_meas,theta_meas,phi_meas,rcae_psi,"));

    let replayed = dir.path().join("replayed.csv");
    let out = rcae(&["replay", "--log", arg(&log), "--out", arg(&replayed)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read_to_string(&replayed).unwrap().lines().count(), 201);
}

#[test]
fn simulate_is_byte_for_byte_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = rcae(&["simulate", "--out", arg(p), "--duration", "3", "--estimators", "rcae,dead_reckon"]);
        assert!(out.status.success());
    }
    let (a, b) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(a, b);
    let header = String::from_utf8_lossy(&a).lines().next().unwrap().to_string();
    assert!(!header.contains("mekf"));
}

#[test]
fn compare_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = rcae(&["compare", "--out-dir", arg(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["rcae.csv", "mekf.csv", "dead_reckon.csv", "summary.txt"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.contains("mean|z|"));
    let mekf = std::fs::read_to_string(dir.path().join("mekf.csv")).unwrap();
    assert!(mekf.lines().next().unwrap().ends_with("mekf_z"));
}

#[test]
fn bad_inputs_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "rcae.lambda = 1.5\n").unwrap();
    let out = rcae(&["simulate", "--config", arg(&cfg), "--out", arg(&dir.path().join("x.csv"))]);
    assert_eq!(out.status.code(), Some(1));

    let out = rcae(&["simulate", "--out", arg(&dir.path().join("x.csv")), "--estimators", "kalman"]);
    assert_eq!(out.status.code(), Some(1));

    let log = dir.path().join("bad.csv");
    std::fs::write(&log, "t,gx,gy,gz,ax,ay,az,mx,my,mz\n0,0,0,0,0,0,1,1,0,1\n0,0,0,0,0,0,1,1,0,1\n").unwrap();
    let out = rcae(&["replay", "--log", arg(&log), "--out", arg(&dir.path().join("y.csv"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 2"));

    let out = rcae(&["replay", "--log", arg(&dir.path().join("missing.csv")), "--out", arg(&dir.path().join("y.csv"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn shipped_config_matches_defaults() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/reference.cfg");
    let cfg = rcae::harness::ScenarioConfig::from_file(&path).unwrap();
    assert_eq!(cfg, rcae::harness::ScenarioConfig::default());
}
