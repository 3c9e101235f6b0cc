use std::path::Path;
use std::process::{Command, Output};

fn vpfp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vpfp")).args(args).output().unwrap()
}

const SMALL: &str = r#"
[grid]
n_x = 16
n_v = 12

[solver]
dt_max = 0.05
t_final = 0.2

[sweep]
epsilons = [0.2, 0.1]
ddp_dt = 0.01
sample_interval = 0.05

[diagnostics]
k = 2
"#;

fn small_config(dir: &Path) -> String {
    let p = dir.join("small.toml");
    std::fs::write(&p, SMALL).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn check_passes_and_prints_one_line_per_property() {
    let out = vpfp(&["check", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().count() >= 6);
    assert!(stdout.lines().all(|l| l.starts_with("PASS ")));
}

#[test]
fn missing_config_exits_two() {
    let out = vpfp(&["sweep", "--config", "/nonexistent/config.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_key_and_unknown_flag_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.toml");
    std::fs::write(&p, "[solver]\nsteps = 3\n").unwrap();
    assert_eq!(vpfp(&["sweep", "--config", p.to_str().unwrap()]).status.code(), Some(2));
    let out = vpfp(&["sweep", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("Usage"));
    assert_eq!(vpfp(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn sweep_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out_dir = dir.path().join("out");
    let o = out_dir.to_str().unwrap();
    let s = vpfp(&["sweep", "--config", &cfg, "--out", o, "--quiet"]);
    assert_eq!(s.status.code(), Some(0), "{}", String::from_utf8_lossy(&s.stderr));
    assert!(s.stdout.is_empty());
    let r = vpfp(&["report", o]);
    assert_eq!(r.status.code(), Some(0));
    let text = String::from_utf8(r.stdout).unwrap();
    assert!(text.contains("0.2 -> 0.1"));
    let csv = std::fs::read_to_string(out_dir.join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().nth(1).unwrap().starts_with("2.0000000000000001e-1,"));
}

#[test]
fn repeated_sweeps_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let s = vpfp(&["sweep", "--config", &cfg, "--out", d.to_str().unwrap(), "--quiet"]);
        assert_eq!(s.status.code(), Some(0));
    }
    let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 5);
    for n in names.iter().filter(|n| *n != "timings.json") {
        assert_eq!(std::fs::read(a.join(n)).unwrap(), std::fs::read(b.join(n)).unwrap(), "{n:?}");
    }
}

#[test]
fn single_runs_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let o = dir.path().to_str().unwrap();
    assert_eq!(vpfp(&["run", "--config", &cfg, "--out", o, "--epsilon", "0.3"]).status.code(), Some(0));
    assert!(dir.path().join("vpfp_eps_0.3.csv").exists());
    assert_eq!(vpfp(&["run", "--config", &cfg, "--out", o, "--model", "fluid"]).status.code(), Some(0));
    assert!(dir.path().join("ddp.csv").exists());
    assert_eq!(vpfp(&["run", "--config", &cfg, "--out", o, "--epsilon", "1.5"]).status.code(), Some(2));
}

#[test]
fn report_without_summary_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(vpfp(&["report", dir.path().to_str().unwrap()]).status.code(), Some(2));
}
