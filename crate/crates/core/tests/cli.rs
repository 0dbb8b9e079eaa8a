use std::path::Path;
use std::process::Command;

use pa_evolve::io::read_snapshot;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pa-evolve"))
}

fn run(args: &[&str]) -> std::process::Output {
    bin().args(args).output().expect("binary runs")
}

const SMALL: &[&str] = &["--variant", "fpa", "--m", "2", "--delta", "-1", "--t", "200", "--replicas", "3", "--seed", "7"];

#[test]
fn evolve_writes_records_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let mut args = vec!["evolve", "--weights", "exp:1", "--hydro", "true", "--check-oracle", "--out-dir", d];
    args.extend_from_slice(SMALL);
    let out = run(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["trajectories.jsonl", "replicas.jsonl", "summary.csv", "config.toml", "manifest.json", "report.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let traj = std::fs::read_to_string(dir.path().join("trajectories.jsonl")).unwrap();
    let first: serde_json::Value = serde_json::from_str(traj.lines().next().unwrap()).unwrap();
    for k in ["seed", "t", "tp", "dg", "dl", "twoK", "twoQ", "tau"] {
        assert!(first.get(k).is_some(), "{k}");
    }
    assert!(first["dl"].is_number());
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
    // the echoed config reproduces the run
    let dir2 = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.toml");
    let out = run(&["evolve", "--config", cfg.to_str().unwrap(), "--out-dir", dir2.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(traj, std::fs::read_to_string(dir2.path().join("trajectories.jsonl")).unwrap());
    let report = run(&["report", dir.path().join("replicas.jsonl").to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&report.stdout).starts_with("t,replicas,sup_q50,sup_q90\n200,3,"));
}

#[test]
fn config_errors_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.toml");
    std::fs::write(&p, "variant = \"fpa\"\nm = 1\ndelta = -2\nt = 100\n").unwrap();
    let out = run(&["evolve", "--config", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("delta"));
    std::fs::write(&p, "variant = \"fpa\"\ndelta = -0.5\nt = 100\nbogus = 3\n").unwrap();
    let out = run(&["evolve", "--config", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
    // flags win over the file
    std::fs::write(&p, "variant = \"fpa\"\nm = 1\ndelta = -2\nt = 100\n").unwrap();
    let out = run(&["evolve", "--config", p.to_str().unwrap(), "--delta", "-0.5", "--horizon-factor", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn generate_and_resume_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.snap");
    let b = dir.path().join("b.snap");
    let c = dir.path().join("c.snap");
    let base = ["--variant", "vpa", "--gamma", "0.6", "--seed", "4", "--weights", "unif:0:2"];
    let go = |t: &str, out: &Path, from: Option<&Path>| {
        let mut args = vec!["generate", "--t", t, "--out", out.to_str().unwrap()];
        args.extend_from_slice(&base);
        if let Some(f) = from {
            args.extend(["--from", f.to_str().unwrap()]);
        }
        assert!(run(&args).status.success());
    };
    go("300", &a, None);
    go("900", &b, Some(&a));
    go("900", &c, None);
    assert_eq!(std::fs::read(&b).unwrap(), std::fs::read(&c).unwrap());
    assert_eq!(read_snapshot(&b).unwrap().t(), 900);
}

#[test]
fn theory_and_checks_run() {
    let out = run(&["theory", "--tau", "2.5", "--t", "10000", "--weights", "exp:1", "--ledger", "--floor"]);
    assert!(out.status.success());
    let s = String::from_utf8_lossy(&out.stdout);
    assert!(s.contains("\"explosive\":true"));
    assert!(s.contains("floored_levels"));
    let out = run(&["theory", "--tau", "2.5", "--t", "10000", "--ledger"]);
    assert_eq!(out.status.code(), Some(2), "nu = 1 without flooring is rejected");
    let out = run(&["verify-pagamma", "--t-max", "5", "--path-len", "2", "--runs", "20000"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("nu_fit"));
    let mut args = vec!["greedy", "--weights", "exp:1", "--start", "start-layer"];
    args.extend_from_slice(SMALL);
    assert!(run(&args).status.success());
    let mut args = vec!["degree-watch", "--s", "3", "--martingale", "200", "--horizon-factor", "4"];
    args.extend_from_slice(SMALL);
    assert!(run(&args).status.success());
    let mut args = vec!["boundary"];
    args.extend_from_slice(SMALL);
    let out = run(&args);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("median_b"));
}
