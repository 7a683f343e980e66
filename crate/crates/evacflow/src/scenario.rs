//! Sequenced phase networks with state carried across topology changes,
//! the receding-horizon loop and the exit-lane sweep.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::engine::{EngineConfig, Simulation, SECONDS_PER_HOUR};
use crate::error::{Error, Result};
use crate::metrics::{export_heatmap, los_classify, write_series, Los, SeriesRow};
use crate::network::{BuildOptions, Network, NetworkConfig, Region};
use crate::optimizer::{receding_horizon, write_trace, SbcdConfig, TraceRow};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Network JSON, relative to the scenario file.
    pub network: PathBuf,
    pub duration_s: f64,
    /// Optional clock check: must equal the sum of earlier durations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_s: Option<f64>,
    /// Western source density (per lane, normalized).
    pub gamma1: f64,
    /// Eastern source density.
    pub gamma2: f64,
    #[serde(default)]
    pub nt_opt_s: f64,
    /// Lane count override for the scenario's `exit_lane_road`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exit_lanes: Option<f64>,
}

fn default_rho_jam() -> f64 {
    200.0
}
fn default_cfl() -> f64 {
    0.5
}
fn default_dx() -> f64 {
    0.01
}
fn default_repeats() -> usize {
    1
}
fn default_exit_road() -> String {
    "Hwy30[7]".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub phases: Vec<PhaseConfig>,
    #[serde(default = "default_rho_jam")]
    pub rho_jam: f64,
    #[serde(default = "default_cfl")]
    pub cfl_nu: f64,
    #[serde(default = "default_dx")]
    pub dx_target_mi: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default = "default_exit_road")]
    pub exit_lane_road: String,
    #[serde(default)]
    pub sbcd: SbcdConfig,
    /// Directory the phase network paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ScenarioConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: ScenarioConfig =
            serde_json::from_str(&text).map_err(|source| Error::Json { path: path.into(), source })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn network_path(&self, phase: &PhaseConfig) -> PathBuf {
        self.base_dir.join(&phase.network)
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.phases.is_empty() {
            errs.push("scenario has no phases".to_string());
        }
        if !(self.rho_jam > 0.0) {
            errs.push(format!("rho_jam must be positive, got {}", self.rho_jam));
        }
        if !(self.cfl_nu > 0.0 && self.cfl_nu <= 1.0) {
            errs.push(format!("cfl_nu must be in (0, 1], got {}", self.cfl_nu));
        }
        if !(self.dx_target_mi > 0.0) {
            errs.push(format!("dx_target_mi must be positive, got {}", self.dx_target_mi));
        }
        if let Err(e) = self.sbcd.validate() {
            errs.push(e.to_string());
        }
        let mut clock = 0.0;
        for (i, p) in self.phases.iter().enumerate() {
            let name = phase_name(p, i);
            if !(p.duration_s >= 0.0) {
                errs.push(format!("phase {name}: duration_s must be nonnegative"));
            }
            if let Some(s) = p.start_s {
                if (s - clock).abs() > 1e-6 {
                    let kind = if s > clock { "gap" } else { "overlap" };
                    errs.push(format!("phase {name}: starts at {s} s but the previous phase ends at {clock} s ({kind})"));
                }
            }
            clock += p.duration_s.max(0.0);
            for (g, v) in [("gamma1", p.gamma1), ("gamma2", p.gamma2)] {
                if !(0.0..=1.0).contains(&v) {
                    errs.push(format!("phase {name}: {g} must be in [0, 1], got {v}"));
                }
            }
            if p.gamma2 < p.gamma1 {
                errs.push(format!("phase {name}: gamma2 {} below gamma1 {}", p.gamma2, p.gamma1));
            }
            if !(p.nt_opt_s >= 0.0) {
                errs.push(format!("phase {name}: nt_opt_s must be nonnegative"));
            }
            if let Some(l) = p.exit_lanes {
                if !(l >= 2.0) {
                    errs.push(format!("phase {name}: exit_lanes must be at least 2, got {l}"));
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }
}

fn phase_name(p: &PhaseConfig, i: usize) -> String {
    p.name.clone().unwrap_or_else(|| format!("phase{i}"))
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Output directory; nothing is written when `None`.
    pub out: Option<PathBuf>,
    /// Heatmap snapshots per phase besides the initial one.
    pub snapshots: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseResult {
    pub name: String,
    pub start_s: f64,
    pub duration_s: f64,
    pub dt_s: f64,
    pub steps: u64,
    pub weighted_time_integrated: f64,
    pub cars_entered: f64,
    pub cars_exited: f64,
    /// Vehicles on roads absent from this phase's network, dropped at its start.
    pub discarded_vehicles: f64,
    /// Phase-relative time at which every non-exit road first averaged LOS E.
    pub flooded_at_s: Option<f64>,
    pub final_preferences: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Totals {
    pub weighted_time_integrated: f64,
    pub cars_entered: f64,
    pub cars_exited: f64,
    pub discarded_vehicles: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioResult {
    pub seed: u64,
    pub repeats: usize,
    pub phases: Vec<PhaseResult>,
    pub totals: Totals,
    /// Per-step rows with scenario-level time and cumulative metrics.
    #[serde(skip)]
    pub series: Vec<SeriesRow>,
    #[serde(skip)]
    pub final_network: Option<Network>,
}

/// Level of service of a road's mean density.
pub fn road_los(net: &Network, i: usize) -> Los {
    let r = &net.roads[i];
    los_classify(&r.flux, r.rho.iter().sum::<f64>() / r.rho.len() as f64)
}

/// Every non-exit road at LOS E on average.
pub fn is_flooded(net: &Network) -> bool {
    (0..net.roads.len()).filter(|&i| !net.roads[i].is_exit).all(|i| road_los(net, i) == Los::E)
}

/// Copies densities of surviving roads, initializes new ones and returns the
/// vehicles on roads that did not survive (plus any lost to lane clamping).
pub fn carry_over(prev: &Network, next: &mut Network) -> f64 {
    let mut lost = 0.0;
    for r in &prev.roads {
        match next.road_index(&r.id) {
            None => lost += r.mass(),
            Some(i) => {
                let dst = &mut next.roads[i];
                let src = if dst.rho.len() == r.rho.len() {
                    r.rho.clone()
                } else {
                    rebin(&r.rho, dst.rho.len())
                };
                let n = dst.flux.lanes();
                for (d, s) in dst.rho.iter_mut().zip(src) {
                    let c = s.clamp(0.0, n);
                    lost += (s - c) * dst.dx;
                    *d = c;
                }
            }
        }
    }
    let ids = |net: &Network, list: &[usize]| list.iter().map(|&r| net.roads[r].id.clone()).collect::<Vec<_>>();
    for k in 0..next.junctions.len() {
        let j = &next.junctions[k];
        let Some(pj) = prev.junctions.iter().find(|p| p.id == j.id) else { continue };
        if ids(prev, &pj.incoming) == ids(next, &j.incoming) && ids(prev, &pj.outgoing) == ids(next, &j.outgoing) {
            next.junctions[k].alpha = pj.alpha.clone();
        }
    }
    lost * prev.rho_jam
}

/// Conservative remap of cell averages onto `m` equal cells.
fn rebin(src: &[f64], m: usize) -> Vec<f64> {
    let n = src.len();
    let mut out = vec![0.0; m];
    for (k, o) in out.iter_mut().enumerate() {
        let (a, b) = (k as f64 / m as f64, (k + 1) as f64 / m as f64);
        let mut acc = 0.0;
        for (i, v) in src.iter().enumerate() {
            let (c, d) = (i as f64 / n as f64, (i + 1) as f64 / n as f64);
            let w = (b.min(d) - a.max(c)).max(0.0);
            acc += v * w;
        }
        *o = acc * m as f64;
    }
    out
}

/// Runs phases one after another, keeping the live network between them.
#[derive(Debug, Clone)]
pub struct Runner {
    pub cfg: ScenarioConfig,
    pub opts: RunOptions,
    net: Option<Network>,
    clock_s: f64,
    pub phases: Vec<PhaseResult>,
    pub series: Vec<SeriesRow>,
    totals: Totals,
    next_phase: usize,
}

impl Runner {
    pub fn new(cfg: ScenarioConfig, opts: RunOptions) -> Result<Self> {
        cfg.validate()?;
        if let Some(d) = &opts.out {
            std::fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
        }
        Ok(Runner { cfg, opts, net: None, clock_s: 0.0, phases: vec![], series: vec![], totals: Totals::default(), next_phase: 0 })
    }

    pub fn remaining(&self) -> usize {
        self.cfg.phases.len() - self.next_phase
    }

    pub fn network(&self) -> Option<&Network> {
        self.net.as_ref()
    }

    fn build_phase(&self, p: &PhaseConfig) -> Result<Network> {
        let path = self.cfg.network_path(p);
        let mut nc = NetworkConfig::load(&path)?;
        if let Some(l) = p.exit_lanes {
            let road = nc.road_mut(&self.cfg.exit_lane_road).ok_or_else(|| {
                Error::Validation(vec![format!(
                    "{}: exit lane road {} not in network",
                    path.display(),
                    self.cfg.exit_lane_road
                )])
            })?;
            road.lanes = l;
        }
        let opts = BuildOptions { rho_jam: self.cfg.rho_jam, dx_target_mi: self.cfg.dx_target_mi };
        Network::build(&nc, &opts).map_err(|e| match e {
            Error::Validation(v) => Error::Validation(v.into_iter().map(|m| format!("{}: {m}", path.display())).collect()),
            e => e,
        })
    }

    /// Runs the next phase and returns its result.
    pub fn run_next(&mut self) -> Result<&PhaseResult> {
        let idx = self.next_phase;
        let p = self.cfg.phases.get(idx).cloned().ok_or_else(|| Error::InvalidParameter("no phases left".into()))?;
        let name = phase_name(&p, idx);
        let mut net = self.build_phase(&p)?;
        let discarded = match &self.net {
            Some(prev) => {
                for r in &mut net.roads {
                    r.rho.fill(0.0);
                }
                carry_over(prev, &mut net)
            }
            None => 0.0,
        };
        // Roads new to this phase: sources start at their γ, the rest keep
        // the configured start density (first phase) or 0.
        for r in &mut net.roads {
            let fresh = self.net.as_ref().is_none_or(|prev| prev.road_index(&r.id).is_none());
            if fresh && r.is_source {
                let g = match r.region {
                    Region::West => p.gamma1,
                    Region::East => p.gamma2,
                };
                r.rho.fill(g * r.flux.lanes());
            }
        }
        net.set_source_densities(p.gamma1, p.gamma2);
        if discarded > 0.0 {
            log::info!("phase {name}: discarded {discarded:.3} vehicles on removed roads");
        }

        let mut sim = Simulation::new(net, EngineConfig { cfl_nu: self.cfg.cfl_nu })?;
        let layout = sim.network.preference_layout();
        let start = self.clock_s;
        let dur_hr = p.duration_s / SECONDS_PER_HOUR;

        let mut snapshots: Vec<(u64, Network)> = Vec::new();
        let want_snaps = self.opts.out.is_some();
        if want_snaps {
            snapshots.push((0, sim.network.clone()));
        }
        let every_hr = if self.opts.snapshots > 0 { dur_hr / self.opts.snapshots as f64 } else { f64::INFINITY };
        let mut next_snap = every_hr;
        let mut flooded_at = is_flooded(&sim.network).then_some(0.0);
        let mut rows = vec![sim.metrics.row(start)];
        let mut trace: Vec<TraceRow> = Vec::new();
        {
            let mut hook = |s: &Simulation| {
                rows.push(s.metrics.row(start + s.t_seconds()));
                if flooded_at.is_none() && is_flooded(&s.network) {
                    flooded_at = Some(s.t_seconds());
                }
                if want_snaps && s.t >= next_snap - s.dt * 1e-6 {
                    snapshots.push((s.steps, s.network.clone()));
                    next_snap += every_hr;
                }
            };
            receding_horizon(
                &mut sim,
                &layout,
                dur_hr,
                p.nt_opt_s / SECONDS_PER_HOUR,
                &SbcdConfig { rng_seed: self.cfg.seed, ..self.cfg.sbcd },
                self.cfg.repeats,
                &mut trace,
                &mut hook,
            )?;
        }

        if let Some(dir) = &self.opts.out {
            write_series(&dir.join(format!("{name}_metrics.csv")), &rows)?;
            for (step, n) in &snapshots {
                export_heatmap(dir, &format!("{name}_{step}"), n)?;
            }
            if p.nt_opt_s > 0.0 {
                write_trace(&dir.join(format!("{name}_trace.csv")), &trace)?;
            }
        }

        let m = &sim.metrics;
        let res = PhaseResult {
            name,
            start_s: start,
            duration_s: p.duration_s,
            dt_s: sim.dt * SECONDS_PER_HOUR,
            steps: sim.steps,
            weighted_time_integrated: m.weighted_time_integrated(),
            cars_entered: m.cars_entered(),
            cars_exited: m.cars_exited(),
            discarded_vehicles: discarded,
            flooded_at_s: flooded_at,
            final_preferences: sim.network.read_preferences(&layout),
        };
        // cumulative series across phases
        let base = self.totals.clone();
        self.series.extend(rows.into_iter().map(|r| SeriesRow {
            t_sec: r.t_sec,
            weighted_time_integrated: base.weighted_time_integrated + r.weighted_time_integrated,
            cars_entered: base.cars_entered + r.cars_entered,
            cars_exited: base.cars_exited + r.cars_exited,
        }));
        self.totals.weighted_time_integrated += res.weighted_time_integrated;
        self.totals.cars_entered += res.cars_entered;
        self.totals.cars_exited += res.cars_exited;
        self.totals.discarded_vehicles += discarded;
        self.clock_s += p.duration_s;
        self.net = Some(sim.network);
        self.next_phase += 1;
        self.phases.push(res);
        Ok(self.phases.last().unwrap())
    }

    pub fn finish(self) -> Result<ScenarioResult> {
        let res = ScenarioResult {
            seed: self.cfg.seed,
            repeats: self.cfg.repeats,
            phases: self.phases,
            totals: self.totals,
            series: self.series,
            final_network: self.net,
        };
        if let Some(dir) = &self.opts.out {
            let path = dir.join("summary.json");
            let text = serde_json::to_string_pretty(&res).map_err(|source| Error::Json { path: path.clone(), source })?;
            std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
        }
        Ok(res)
    }
}

pub fn run_scenario(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<ScenarioResult> {
    let mut r = Runner::new(cfg.clone(), opts.clone())?;
    while r.remaining() > 0 {
        r.run_next()?;
    }
    r.finish()
}

#[derive(Debug, Clone, Serialize)]
pub struct LaneSweep {
    pub lanes: Vec<f64>,
    /// Cumulative cars exited over the overridden phases, one row per time
    /// in the first run: `(t_sec, [exited per lane count])`.
    pub series: Vec<(f64, Vec<f64>)>,
    pub totals: Vec<Totals>,
}

impl LaneSweep {
    /// Final cars-exited advantage of each lane count over the first.
    pub fn advantage(&self) -> Vec<f64> {
        let base = self.totals[0].cars_exited;
        self.totals.iter().map(|t| t.cars_exited - base).collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = csv::Writer::from_writer(f);
        let mut head = vec!["t_sec".to_string()];
        head.extend(self.lanes.iter().map(|l| format!("exited_{l}")));
        head.extend(self.lanes.iter().skip(1).map(|l| format!("diff_{l}")));
        w.write_record(&head)?;
        for (t, v) in &self.series {
            let mut rec = vec![t.to_string()];
            rec.extend(v.iter().map(f64::to_string));
            rec.extend(v.iter().skip(1).map(|x| (x - v[0]).to_string()));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Runs the phases without `exit_lanes` once, then the phases with it once
/// per entry of `lanes`, starting from the shared state.
pub fn lane_reversal_experiment(cfg: &ScenarioConfig, lanes: &[f64], opts: &RunOptions) -> Result<LaneSweep> {
    if lanes.is_empty() {
        return Err(Error::InvalidParameter("no lane counts given".into()));
    }
    if let Some(l) = lanes.iter().find(|l| !(**l >= 2.0)) {
        return Err(Error::InvalidParameter(format!("exit lanes must be at least 2, got {l}")));
    }
    let split = cfg.phases.iter().position(|p| p.exit_lanes.is_some()).ok_or_else(|| {
        Error::Validation(vec!["lane sweep needs at least one phase with exit_lanes".into()])
    })?;
    let mut prefix = Runner::new(cfg.clone(), RunOptions { out: None, snapshots: 0 })?;
    for _ in 0..split {
        prefix.run_next()?;
    }
    let base_rows = prefix.series.len();
    let runs: Vec<Result<Runner>> = {
        use rayon::prelude::*;
        lanes
            .par_iter()
            .map(|&l| {
                let mut r = prefix.clone();
                for p in r.cfg.phases.iter_mut().skip(split) {
                    if p.exit_lanes.is_some() {
                        p.exit_lanes = Some(l);
                    }
                }
                r.opts = RunOptions {
                    out: opts.out.as_ref().map(|d| d.join(format!("lanes_{l}"))),
                    snapshots: opts.snapshots,
                };
                if let Some(d) = &r.opts.out {
                    std::fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
                }
                while r.remaining() > 0 && r.cfg.phases[r.next_phase].exit_lanes.is_some() {
                    r.run_next()?;
                }
                Ok(r)
            })
            .collect()
    };
    let runs: Vec<Runner> = runs.into_iter().collect::<Result<_>>()?;
    let pre_exit = prefix.totals.cars_exited;
    let n = runs.iter().map(|r| r.series.len()).min().unwrap_or(base_rows);
    let series = (base_rows..n)
        .map(|i| (runs[0].series[i].t_sec, runs.iter().map(|r| r.series[i].cars_exited - pre_exit).collect()))
        .collect();
    let totals = runs
        .iter()
        .map(|r| Totals {
            weighted_time_integrated: r.totals.weighted_time_integrated - prefix.totals.weighted_time_integrated,
            cars_entered: r.totals.cars_entered - prefix.totals.cars_entered,
            cars_exited: r.totals.cars_exited - pre_exit,
            discarded_vehicles: r.totals.discarded_vehicles - prefix.totals.discarded_vehicles,
        })
        .collect();
    let sweep = LaneSweep { lanes: lanes.to_vec(), series, totals };
    if let Some(d) = &opts.out {
        std::fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
        sweep.write_csv(&d.join("lane_sweep.csv"))?;
    }
    Ok(sweep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rebin_conserves() {
        let src = [0.1, 0.5, 0.9];
        for m in [1, 2, 3, 5, 7] {
            let out = rebin(&src, m);
            let a: f64 = src.iter().sum::<f64>() / 3.0;
            let b: f64 = out.iter().sum::<f64>() / m as f64;
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn gap_is_rejected() {
        let phase = |start| PhaseConfig {
            name: None,
            network: "x.json".into(),
            duration_s: 10.0,
            start_s: Some(start),
            gamma1: 0.1,
            gamma2: 0.1,
            nt_opt_s: 0.0,
            exit_lanes: None,
        };
        let cfg = |phases| ScenarioConfig {
            phases,
            rho_jam: 200.0,
            cfl_nu: 0.5,
            dx_target_mi: 0.01,
            seed: 0,
            repeats: 1,
            exit_lane_road: default_exit_road(),
            sbcd: SbcdConfig::default(),
            base_dir: PathBuf::new(),
        };
        assert!(cfg(vec![phase(0.0), phase(10.0)]).validate().is_ok());
        let e = cfg(vec![phase(0.0), phase(12.0)]).validate().unwrap_err();
        assert!(e.to_string().contains("gap"), "{e}");
        let e = cfg(vec![phase(0.0), phase(5.0)]).validate().unwrap_err();
        assert!(e.to_string().contains("overlap"), "{e}");
    }
}
