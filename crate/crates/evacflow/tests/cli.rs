use std::path::PathBuf;
use std::process::{Command, Output};

fn evacflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evacflow")).args(args).env("RUST_LOG", "error").output().unwrap()
}

fn scenario(f: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/lahaina").join(f).to_string_lossy().into_owned()
}

#[test]
fn malformed_json_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"phases\": [").unwrap();
    let out = evacflow(&["simulate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.json"));
}

#[test]
fn unknown_field_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("s.json");
    std::fs::write(&bad, r#"{"phases": [], "speed": 3}"#).unwrap();
    assert_eq!(evacflow(&["simulate", bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn gamma_override_is_validated() {
    let out = evacflow(&["--gamma1", "0.5", "--gamma2", "0.1", "simulate", &scenario("am_base_light.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma2"));
}

#[test]
fn toy_prints_both_routes() {
    let out = evacflow(&["toy", "--experiment", "A", "--t", "500"]);
    assert!(out.status.success());
    let s = String::from_utf8_lossy(&out.stdout);
    assert!(s.contains("engine") && s.contains("closed form exited="), "{s}");
    assert!(!evacflow(&["toy", "--experiment", "Q"]).status.success());
}

#[test]
fn simulate_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = evacflow(&["--dx", "0.05", "simulate", &scenario("am_base_light.json"), "--out", dir.path().to_str().unwrap(), "--snapshots", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["am_base_metrics.csv", "am_base_0.csv", "am_base_0.svg", "summary.json"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert!(summary["totals"]["cars_exited"].as_f64().unwrap() > 0.0);
}

#[test]
fn sweep_rejects_single_lane() {
    let out = evacflow(&["sweep-lanes", &scenario("phase4.json"), "--lanes", "1,2"]);
    assert_eq!(out.status.code(), Some(1));
}
