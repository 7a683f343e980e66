use std::path::PathBuf;

use evacflow::scenario::{carry_over, run_scenario, PhaseConfig, RunOptions, ScenarioConfig};
use evacflow::{BuildOptions, Network, NetworkConfig};

fn data(f: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/lahaina").join(f)
}

fn net(f: &str) -> Network {
    Network::build(&NetworkConfig::load(data(f)).unwrap(), &BuildOptions { rho_jam: 200.0, dx_target_mi: 0.02 }).unwrap()
}

fn phase(name: &str, network: &str, duration_s: f64) -> PhaseConfig {
    PhaseConfig {
        name: Some(name.into()),
        network: network.into(),
        duration_s,
        start_s: None,
        gamma1: 0.05,
        gamma2: 0.05,
        nt_opt_s: 0.0,
        exit_lanes: None,
    }
}

fn scenario(phases: Vec<PhaseConfig>) -> ScenarioConfig {
    let mut cfg: ScenarioConfig = serde_json::from_str(r#"{"phases": []}"#).unwrap();
    cfg.phases = phases;
    cfg.dx_target_mi = 0.05;
    cfg.base_dir = data("");
    cfg
}

#[test]
fn carryover_keeps_surviving_roads_and_counts_the_rest() {
    let mut prev = net("am_base.json");
    for (k, r) in prev.roads.iter_mut().enumerate() {
        let n = r.flux.lanes();
        for (m, v) in r.rho.iter_mut().enumerate() {
            *v = n * (((k * 7 + m * 3) % 11) as f64 / 11.0);
        }
    }
    let mut next = net("am2.json");
    let discarded = carry_over(&prev, &mut next);
    let mut removed = 0.0;
    for r in &prev.roads {
        match next.road(&r.id) {
            Some(s) => assert_eq!(s.rho, r.rho, "{}", r.id),
            None => removed += r.mass(),
        }
    }
    assert!(removed > 0.0);
    assert!((discarded - removed * prev.rho_jam).abs() < 1e-9);
}

#[test]
fn zero_duration_phase_is_a_no_op() {
    let cfg = scenario(vec![phase("a", "am_base.json", 0.0), phase("b", "am2.json", 60.0)]);
    let r = run_scenario(&cfg, &RunOptions::default()).unwrap();
    assert_eq!(r.phases[0].steps, 0);
    assert_eq!(r.phases[0].cars_exited, 0.0);
    assert!(r.phases[1].steps > 0);
    assert!((r.phases[1].start_s - 0.0).abs() < 1e-12);
}

#[test]
fn gap_between_phases_is_a_validation_error() {
    let mut b = phase("b", "am2.json", 60.0);
    b.start_s = Some(100.0);
    let cfg = scenario(vec![phase("a", "am_base.json", 60.0), b]);
    let e = run_scenario(&cfg, &RunOptions::default()).unwrap_err();
    assert!(e.is_validation() && e.to_string().contains("gap"), "{e}");
}

#[test]
fn outputs_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario(vec![phase("a", "am_base.json", 120.0)]);
    let r = run_scenario(&cfg, &RunOptions { out: Some(dir.path().into()), snapshots: 2 }).unwrap();
    let metrics = std::fs::read_to_string(dir.path().join("a_metrics.csv")).unwrap();
    assert!(metrics.starts_with("t_sec,weighted_time_integrated,cars_entered,cars_exited"));
    let last = metrics.lines().last().unwrap();
    let exited: f64 = last.split(',').nth(3).unwrap().parse().unwrap();
    assert!((exited - r.totals.cars_exited).abs() < 1e-9);
    assert!(dir.path().join("summary.json").is_file());
    let svgs = std::fs::read_dir(dir.path()).unwrap().filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "svg")).count();
    assert_eq!(svgs, 3);
}

#[test]
fn weighted_total_grows_with_eastern_density() {
    let mut cfg = ScenarioConfig::load(data("full_sequence.json")).unwrap();
    cfg.dx_target_mi = 0.05;
    let mut last = f64::NEG_INFINITY;
    for g in [0.1, 0.2, 0.4] {
        let mut c = cfg.clone();
        for p in c.phases.iter_mut().filter(|p| p.gamma2 > p.gamma1) {
            p.gamma2 = g;
        }
        let w = run_scenario(&c, &RunOptions::default()).unwrap().totals.weighted_time_integrated;
        assert!(w >= last, "gamma2 {g}: {w} < {last}");
        last = w;
    }
}
