//! Godunov time stepping on a road network.
//!
//! Each step first advances every road using exact Riemann fluxes inside
//! the road and, at junction ends, the fluxes stored by the previous junction
//! resolution. Junctions are then resolved from the updated cells and their
//! fluxes stored for the next step.

use crate::error::{Error, Result};
use crate::flux::{riemann_flux, Branch, DENSITY_SLACK};
use crate::junction::{resolve_into, JunctionProblem};
use crate::metrics::MetricsAccumulator;
use crate::network::{Boundary, Network, RoadEnd};

pub const SECONDS_PER_HOUR: f64 = 3600.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineConfig {
    pub cfl_nu: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { cfl_nu: 0.5 }
    }
}

/// Global step `ν · min_i dx_i / max|f_i'|` in hours.
pub fn stable_dt(net: &Network, cfl_nu: f64) -> f64 {
    net.roads
        .iter()
        .map(|r| r.dx / r.flux.max_wave_speed())
        .fold(f64::INFINITY, f64::min)
        * cfl_nu
}

/// Boundary interface fluxes of one step (normalized flux units).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepFlux {
    /// Flux through left ends that are not attached to a junction.
    pub entered: f64,
    /// Flux through right ends that are not attached to a junction.
    pub exited: f64,
}

fn left_ghost(rho1: f64, b: Boundary, flux: &crate::flux::NormalizedFlux) -> f64 {
    match b {
        Boundary::NonReflecting => rho1,
        Boundary::Prescribed(d) => {
            if flux.derivative(rho1) < 0.0 {
                rho1
            } else {
                d * flux.lanes()
            }
        }
    }
}

fn right_ghost(rho_m: f64, b: Boundary, flux: &crate::flux::NormalizedFlux) -> f64 {
    match b {
        Boundary::NonReflecting => rho_m,
        Boundary::Prescribed(d) => {
            if flux.derivative(rho_m) > 0.0 {
                rho_m
            } else {
                d * flux.lanes()
            }
        }
    }
}

impl Network {
    /// Resolves every junction from the current cells and stores the fluxes.
    pub fn resolve_junctions(&mut self, dt: f64) {
        let mut c_in = Vec::new();
        let mut c_out = Vec::new();
        let mut g_in = Vec::new();
        let mut g_out = Vec::new();
        for j in &mut self.junctions {
            c_in.clear();
            c_out.clear();
            for &ri in &j.incoming {
                let r = &self.roads[ri];
                c_in.push(r.flux.demand(*r.rho.last().unwrap(), dt));
            }
            for &ro in &j.outgoing {
                let r = &self.roads[ro];
                c_out.push(r.flux.supply(r.rho[0], dt));
            }
            let p = JunctionProblem { c_in: &c_in, c_out: &c_out, a: &j.alpha };
            j.regime = resolve_into(&p, &mut g_in, &mut g_out);
            j.gamma_in.copy_from_slice(&g_in);
            j.gamma_out.copy_from_slice(&g_out);
        }
        for j in &self.junctions {
            for (k, &ri) in j.incoming.iter().enumerate() {
                let r = &mut self.roads[ri];
                r.ghost.1 = r.flux.inverse_clamped(j.gamma_in[k], Branch::Free);
            }
            for (k, &ro) in j.outgoing.iter().enumerate() {
                let r = &mut self.roads[ro];
                r.ghost.0 = r.flux.inverse_clamped(j.gamma_out[k], Branch::Congested);
            }
        }
    }

    /// One step of length `dt` hours.
    pub fn step(&mut self, dt: f64, scratch: &mut Vec<f64>) -> Result<StepFlux> {
        let mut out = StepFlux::default();
        for r in &mut self.roads {
            let m = r.rho.len();
            let f = &r.flux;
            scratch.clear();
            scratch.resize(m + 1, 0.0);
            scratch[0] = match r.left {
                RoadEnd::Junction { junction, slot } => self.junctions[junction].gamma_out[slot],
                RoadEnd::Boundary(b) => {
                    let g = left_ghost(r.rho[0], b, f);
                    r.ghost.0 = g;
                    let v = riemann_flux(f, g, r.rho[0]);
                    out.entered += v;
                    v
                }
            };
            for k in 1..m {
                scratch[k] = riemann_flux(f, r.rho[k - 1], r.rho[k]);
            }
            scratch[m] = match r.right {
                RoadEnd::Junction { junction, slot } => self.junctions[junction].gamma_in[slot],
                RoadEnd::Boundary(b) => {
                    let g = right_ghost(r.rho[m - 1], b, f);
                    r.ghost.1 = g;
                    let v = riemann_flux(f, r.rho[m - 1], g);
                    out.exited += v;
                    v
                }
            };
            let k = dt / r.dx;
            let n = f.lanes();
            for (i, rho) in r.rho.iter_mut().enumerate() {
                let v = *rho - k * (scratch[i + 1] - scratch[i]);
                if !(v >= -DENSITY_SLACK && v <= n + DENSITY_SLACK) {
                    return Err(Error::Numerical(format!(
                        "road {} cell {i}: density {v} left [0, {n}] (scheme blow-up)",
                        r.id
                    )));
                }
                *rho = v.clamp(0.0, n);
            }
        }
        self.resolve_junctions(dt);
        Ok(out)
    }
}

/// Network plus clock, step size and metrics.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub network: Network,
    pub dt: f64,
    /// Hours since the start of the run.
    pub t: f64,
    pub steps: u64,
    pub metrics: MetricsAccumulator,
    scratch: Vec<f64>,
}

impl Simulation {
    /// Wraps a network, choosing `dt` from the CFL condition and resolving
    /// junctions once so the first step has stored fluxes.
    pub fn new(mut network: Network, cfg: EngineConfig) -> Result<Self> {
        if !(cfg.cfl_nu > 0.0 && cfg.cfl_nu <= 1.0) {
            return Err(Error::InvalidParameter(format!("CFL number must be in (0, 1], got {}", cfg.cfl_nu)));
        }
        let dt = stable_dt(&network, cfg.cfl_nu);
        network.resolve_junctions(dt);
        let metrics = MetricsAccumulator::new(&network);
        Ok(Simulation { network, dt, t: 0.0, steps: 0, metrics, scratch: Vec::new() })
    }

    /// Fixed step, fresh clock and metrics, no junction priming. Used to
    /// continue from a network whose stored fluxes are already current.
    pub fn with_dt(network: Network, dt: f64) -> Self {
        let metrics = MetricsAccumulator::new(&network);
        Simulation { network, dt, t: 0.0, steps: 0, metrics, scratch: Vec::new() }
    }

    pub fn step_once(&mut self, h: f64) -> Result<()> {
        self.metrics.accumulate_state(&self.network, h);
        let flux = self.network.step(h, &mut self.scratch)?;
        self.metrics.accumulate_flux(flux, h);
        self.t += h;
        self.steps += 1;
        Ok(())
    }

    /// Advances by `duration` hours; the last step is shortened to land on
    /// the end time exactly.
    pub fn advance(&mut self, duration: f64) -> Result<()> {
        self.advance_with(duration, 0, |_| {})
    }

    /// As [`advance`](Self::advance), calling `hook` every `every` steps
    /// (never when `every` is 0) and once at the end.
    pub fn advance_with(&mut self, duration: f64, every: u64, mut hook: impl FnMut(&Simulation)) -> Result<()> {
        let end = self.t + duration;
        let tol = self.dt * 1e-9;
        while self.t < end - tol {
            let h = self.dt.min(end - self.t);
            self.step_once(h)?;
            if every > 0 && self.steps % every == 0 {
                hook(self);
            }
        }
        self.t = self.t.max(end);
        Ok(())
    }

    pub fn t_seconds(&self) -> f64 {
        self.t * SECONDS_PER_HOUR
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{BoundaryConfig, BuildOptions, EndConfig, JunctionConfig, NetworkConfig, RoadConfig};

    fn single(rho: f64) -> NetworkConfig {
        NetworkConfig {
            name: None,
            roads: vec![RoadConfig {
                id: "r".into(),
                length_mi: 1.0,
                lanes: 1.0,
                v_f_mph: 25.0,
                f_c_vphpl: 500.0,
                left: EndConfig::Boundary(BoundaryConfig::Nonreflecting),
                right: EndConfig::Boundary(BoundaryConfig::Nonreflecting),
                source: false,
                exit: true,
                init_density: Some(rho),
                region: None,
                geometry: None,
            }],
            junctions: vec![],
        }
    }

    #[test]
    fn constant_state_is_steady() {
        for rho in [0.0, 0.1, 0.5, 0.9] {
            let net = Network::build(&single(rho), &BuildOptions { rho_jam: 100.0, dx_target_mi: 0.01 }).unwrap();
            let mut sim = Simulation::new(net, EngineConfig::default()).unwrap();
            for _ in 0..100 {
                let dt = sim.dt;
                sim.step_once(dt).unwrap();
            }
            assert!(sim.network.roads[0].rho.iter().all(|&v| (v - rho).abs() < 1e-14));
        }
    }

    #[test]
    fn dt_from_cfl() {
        let net = Network::build(&single(0.0), &BuildOptions { rho_jam: 100.0, dx_target_mi: 0.01 }).unwrap();
        // v_f = 25 dominates 2 f_c / (1 − σ) = 12.5.
        assert!((stable_dt(&net, 0.5) - 0.5 * 0.01 / 25.0).abs() < 1e-15);
    }

    #[test]
    fn advance_lands_on_end_time() {
        let net = Network::build(&single(0.3), &BuildOptions { rho_jam: 100.0, dx_target_mi: 0.01 }).unwrap();
        let mut sim = Simulation::new(net, EngineConfig::default()).unwrap();
        sim.advance(1.0 / 3600.0).unwrap();
        assert!((sim.t_seconds() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn one_to_one_junction_passes_flow() {
        let road = |id: &str, l: EndConfig, r: EndConfig, exit| RoadConfig {
            id: id.into(),
            length_mi: 0.5,
            lanes: 1.0,
            v_f_mph: 25.0,
            f_c_vphpl: 500.0,
            left: l,
            right: r,
            source: false,
            exit,
            init_density: Some(0.1),
            region: None,
            geometry: None,
        };
        let nr = || EndConfig::Boundary(BoundaryConfig::Nonreflecting);
        let cfg = NetworkConfig {
            name: None,
            roads: vec![road("a", nr(), EndConfig::Junction("J".into()), false), road("b", EndConfig::Junction("J".into()), nr(), true)],
            junctions: vec![JunctionConfig { id: "J".into(), incoming: vec!["a".into()], outgoing: vec!["b".into()], alpha: None }],
        };
        let net = Network::build(&cfg, &BuildOptions { rho_jam: 100.0, dx_target_mi: 0.01 }).unwrap();
        let mut sim = Simulation::new(net, EngineConfig::default()).unwrap();
        sim.advance(0.01).unwrap();
        for r in &sim.network.roads {
            assert!(r.rho.iter().all(|&v| (v - 0.1).abs() < 1e-12), "{}", r.id);
        }
        assert!((sim.network.junctions[0].gamma_in[0] - 2.5).abs() < 1e-12);
    }
}
