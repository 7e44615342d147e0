use std::path::PathBuf;
use std::process::Command;

use hyperholo::cauchy::TheoremWeight;
use hyperholo::runner::{run, run_check, Check, ExperimentConfig, RunOptions};
use hyperholo::{Error, Quaternion};

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("hyperholo-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

fn sample(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs").join(name)
}

#[test]
fn sample_configs_parse() {
    for name in ["default.json", "exponent.json", "box.json"] {
        ExperimentConfig::from_path(&sample(name)).unwrap();
    }
}

#[test]
fn config_errors_carry_a_path() {
    let cases = [
        (r#"{"checks": ["stokes"], "q": [1, 2, 3]}"#, "q"),
        (r#"{"checks": ["stokes"], "map": {"a": [1,0,0,0], "b": [0,0,0,0], "c": [0,0,0,0], "d": [0,0,0,0]}}"#, "map"),
        (r#"{"checks": ["stokes"], "resolution": {"sphere": [1, 2, 3], "radial": 4, "box_per_axis": 4, "extra": 1}}"#, "resolution"),
        (r#"{"checks": []}"#, "checks"),
        (r#"{"checks": ["stokes"], "domain": {"ball": {"center": [0,0,0,0], "radius": -1}}}"#, "domain"),
    ];
    for (text, want) in cases {
        match ExperimentConfig::from_json(text) {
            Err(Error::Config { path, .. }) => assert!(path.starts_with(want), "{path} for {text}"),
            other => panic!("{text}: {other:?}"),
        }
    }
}

#[test]
fn serial_and_parallel_runs_write_identical_files() {
    let mut cfg = ExperimentConfig::with_checks(&[Check::Stokes, Check::CauchyTheorem, Check::Errata, Check::Inclusion]);
    cfg.q = Quaternion::new(0.2, 0.1, -0.1, 0.3);
    let (a, b) = (scratch("serial"), scratch("parallel"));
    let s1 = run(&cfg, &RunOptions { out_dir: Some(a.clone()), csv: true, parallel: false }).unwrap();
    let s2 = run(&cfg, &RunOptions { out_dir: Some(b.clone()), csv: true, parallel: true }).unwrap();
    assert!(s1.all_pass(), "{}", s1.table());
    assert_eq!(s1.table(), s2.table());
    for f in ["stokes.json", "cauchy-theorem.json", "errata.json", "inclusion.json", "summary.txt", "summary.csv"] {
        let (x, y) = (std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap());
        assert_eq!(x, y, "{f}");
    }
    let csv = std::fs::read_to_string(a.join("summary.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.starts_with("name,pass,max_residual,tolerance,runtime_ms"));
}

#[test]
fn doubled_theorem_weight_fails_with_an_erratum() {
    let mut cfg = ExperimentConfig::with_checks(&[Check::CauchyTheorem]);
    cfg.q = Quaternion::new(0.3, 0.2, 0.0, 0.1);
    cfg.theorem_weight = TheoremWeight::Double;
    let rep = run_check(&cfg, Check::CauchyTheorem).unwrap();
    assert!(!rep.pass);
    assert_eq!(rep.errata.len(), 1);
}

#[test]
fn errors_become_failing_reports() {
    let cfg = ExperimentConfig::with_checks(&[Check::CovarianceExponent]);
    assert!(run_check(&cfg, Check::CovarianceExponent).is_err());
    let s = run(&cfg, &RunOptions::default()).unwrap();
    assert!(!s.all_pass());
    assert_eq!(s.exit_code(), 1);
    assert!(s.reports[0].params.contains_key("error"));
}

#[test]
fn binary_round_trip() {
    let exe = env!("CARGO_BIN_EXE_hyperholo");
    let out = Command::new(exe).arg("--list-checks").output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), Check::ALL.len());

    let dir = scratch("bin");
    let st = Command::new(exe)
        .args(["run", sample("exponent.json").to_str().unwrap(), "--out", dir.to_str().unwrap(), "--csv"])
        .output()
        .unwrap();
    assert!(st.status.success());
    assert!(String::from_utf8(st.stdout).unwrap().contains("covariance-exponent    PASS"));
    let rep: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("covariance-exponent.json")).unwrap()).unwrap();
    assert_eq!(rep["params"]["passing_exponent"], "+4");
    assert_eq!(rep["runtime_ms"], 0);

    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"checks": ["stokes"], "seeed": 1}"#).unwrap();
    let out = Command::new(exe).args(["run", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seeed"));

    let out = Command::new(exe)
        .args(["verify", "stokes", "--domain", "box:0,0,0,0,1,1,1,1", "--q", "0.1,0.2,0,0", "--resolution", "8"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["pass"], true);

    let out = Command::new(exe).args(["bergman", "kernel", "--points", "2"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
