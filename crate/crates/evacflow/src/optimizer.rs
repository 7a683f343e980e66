//! Stochastic block coordinate descent over junction preferences.
//!
//! Each iteration samples `s` coordinates, estimates the partial derivatives
//! of the mollified loss by forward differences and backtracks the step size
//! until the Armijo–Goldstein condition holds.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{Simulation, SECONDS_PER_HOUR};
use crate::error::{Error, Result};
use crate::network::{full_entries, Network, PreferenceLayout};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SbcdConfig {
    pub n_iter: usize,
    /// Coordinates sampled per iteration (clamped to the parameter count).
    pub s: usize,
    /// Armijo control factor `c`.
    pub control: f64,
    /// Step decay factor `f`.
    pub decay: f64,
    pub tau_init: f64,
    pub n_decay: usize,
    pub fd_epsilon: f64,
    pub eps_tol: f64,
    pub rng_seed: u64,
}

impl Default for SbcdConfig {
    fn default() -> Self {
        SbcdConfig {
            n_iter: 100,
            s: 10,
            control: 0.5,
            decay: 0.5,
            tau_init: 1.0,
            n_decay: 10,
            fd_epsilon: 1e-3,
            eps_tol: 0.01,
            rng_seed: 0,
        }
    }
}

impl SbcdConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.control > 0.0 && self.control < 1.0) {
            return bad(format!("control factor must be in (0, 1), got {}", self.control));
        }
        if !(self.decay > 0.0 && self.decay < 1.0) {
            return bad(format!("decay factor must be in (0, 1), got {}", self.decay));
        }
        if !(self.eps_tol > 0.0 && self.eps_tol < 0.5) {
            return bad(format!("boundary tolerance must be in (0, 0.5), got {}", self.eps_tol));
        }
        if !(self.fd_epsilon > 0.0) || !(self.tau_init > 0.0) {
            return bad("finite-difference epsilon and initial step must be positive".into());
        }
        if self.s == 0 {
            return bad("sample size s must be at least 1".into());
        }
        Ok(())
    }
}

/// A loss over a flat preference vector.
pub trait Objective: Sync {
    fn loss(&self, alpha: &[f64]) -> Result<f64>;

    /// Entries checked against `[ε_tol, 1 − ε_tol]`, including implied ones.
    fn constrained_entries(&self, alpha: &[f64]) -> Vec<f64> {
        alpha.to_vec()
    }

    /// Horizon `T` in seconds, scaling the penalty branch.
    fn horizon_seconds(&self) -> f64;
}

/// `max{0, max αᵢ − (1 − ε_tol), ε_tol − min αᵢ}`.
pub fn boundary_excess(alpha: &[f64], eps_tol: f64) -> f64 {
    let hi = alpha.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = alpha.iter().cloned().fold(f64::INFINITY, f64::min);
    if alpha.is_empty() {
        return 0.0;
    }
    0f64.max(hi - (1.0 - eps_tol)).max(eps_tol - lo)
}

/// The loss inside the feasible box, `100 · min(excess, 1) · T` outside.
pub fn mollified_loss(obj: &dyn Objective, alpha: &[f64], eps_tol: f64) -> Result<f64> {
    let e = boundary_excess(&obj.constrained_entries(alpha), eps_tol);
    if e > 0.0 {
        Ok(100.0 * e.min(1.0) * obj.horizon_seconds())
    } else {
        obj.loss(alpha)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    /// Receding-horizon window, 0 for a single solve.
    pub window: usize,
    pub repeat: usize,
    pub iter: usize,
    /// Sampled indices joined by `;`.
    pub indices: String,
    pub p_norm: f64,
    pub tau: f64,
    pub accepted: bool,
    /// Mollified loss at the iterate after this iteration.
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SbcdResult {
    pub alpha: Vec<f64>,
    pub loss: f64,
    pub trace: Vec<TraceRow>,
}

pub fn sbcd(obj: &dyn Objective, alpha0: &[f64], cfg: &SbcdConfig) -> Result<SbcdResult> {
    cfg.validate()?;
    let p_len = alpha0.len();
    let mut alpha = alpha0.to_vec();
    let mut loss = mollified_loss(obj, &alpha, cfg.eps_tol)?;
    let mut trace = Vec::with_capacity(cfg.n_iter);
    if p_len == 0 {
        return Ok(SbcdResult { alpha, loss, trace });
    }
    let s = cfg.s.min(p_len);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);

    for iter in 0..cfg.n_iter {
        let idx = rand::seq::index::sample(&mut rng, p_len, s).into_vec();
        let partials: Vec<Result<f64>> = idx
            .par_iter()
            .map(|&i| {
                let h = cfg.fd_epsilon * alpha[i].abs().max(cfg.fd_epsilon);
                let mut a = alpha.clone();
                a[i] += h;
                Ok(-(mollified_loss(obj, &a, cfg.eps_tol)? - loss) / h)
            })
            .collect();
        let mut p = vec![0.0; p_len];
        for (&i, d) in idx.iter().zip(partials) {
            p[i] = d?;
        }
        let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        let indices = idx.iter().map(usize::to_string).collect::<Vec<_>>().join(";");
        if !(norm > 0.0) || !norm.is_finite() {
            trace.push(TraceRow { window: 0, repeat: 0, iter, indices, p_norm: norm, tau: 0.0, accepted: false, loss });
            continue;
        }

        let mut tau = cfg.tau_init;
        let mut n_decay = 0;
        let step = |tau: f64| -> Vec<f64> { alpha.iter().zip(&p).map(|(a, d)| a + tau * d / norm).collect() };
        let mut cand = step(tau);
        let mut cand_loss = mollified_loss(obj, &cand, cfg.eps_tol)?;
        while cand_loss > loss - cfg.control * tau * norm && n_decay < cfg.n_decay {
            tau *= cfg.decay;
            n_decay += 1;
            cand = step(tau);
            cand_loss = mollified_loss(obj, &cand, cfg.eps_tol)?;
        }
        let accepted = n_decay < cfg.n_decay && cand_loss <= loss - cfg.control * tau * norm;
        if accepted {
            alpha = cand;
            loss = cand_loss;
        }
        trace.push(TraceRow { window: 0, repeat: 0, iter, indices, p_norm: norm, tau, accepted, loss });
    }
    Ok(SbcdResult { alpha, loss, trace })
}

/// Loss of a network run from its current state: applies the preferences to
/// a copy, re-resolves its junctions and simulates for the horizon.
pub struct NetworkObjective<'a> {
    pub base: &'a Network,
    pub layout: &'a PreferenceLayout,
    /// Step in hours.
    pub dt: f64,
    pub horizon_hr: f64,
}

impl NetworkObjective<'_> {
    pub fn run(&self, alpha: &[f64]) -> Result<Simulation> {
        let mut net = self.base.clone();
        net.apply_preferences(self.layout, alpha)?;
        net.resolve_junctions(self.dt);
        let mut sim = Simulation::with_dt(net, self.dt);
        sim.advance(self.horizon_hr)?;
        Ok(sim)
    }
}

impl Objective for NetworkObjective<'_> {
    fn loss(&self, alpha: &[f64]) -> Result<f64> {
        Ok(self.run(alpha)?.metrics.loss())
    }

    fn constrained_entries(&self, alpha: &[f64]) -> Vec<f64> {
        full_entries(self.layout, alpha)
    }

    fn horizon_seconds(&self) -> f64 {
        self.horizon_hr * SECONDS_PER_HOUR
    }
}

/// Optimizes on windows of `nt_opt_hr` from the live state, then simulates
/// each window with the optimum. Every window runs `repeats` independent
/// solves (seeds `rng_seed + k·repeats + r` for window `k`) from the current
/// preferences and applies their mean. `hook` sees every step. With
/// `nt_opt_hr == 0` this is a plain advance.
#[allow(clippy::too_many_arguments)]
pub fn receding_horizon(
    sim: &mut Simulation,
    layout: &PreferenceLayout,
    duration_hr: f64,
    nt_opt_hr: f64,
    cfg: &SbcdConfig,
    repeats: usize,
    trace: &mut Vec<TraceRow>,
    hook: &mut dyn FnMut(&Simulation),
) -> Result<()> {
    if nt_opt_hr <= 0.0 || layout.len == 0 {
        return sim.advance_with(duration_hr, 1, hook);
    }
    cfg.validate()?;
    let repeats = repeats.max(1);
    let end = sim.t + duration_hr;
    let tol = sim.dt * 1e-9;
    let mut k = 0;
    while sim.t < end - tol {
        let window = nt_opt_hr.min(end - sim.t);
        let obj = NetworkObjective { base: &sim.network, layout, dt: sim.dt, horizon_hr: window };
        let alpha0 = sim.network.read_preferences(layout);
        let runs: Vec<Result<SbcdResult>> = (0..repeats)
            .into_par_iter()
            .map(|r| {
                let seed = cfg.rng_seed.wrapping_add((k * repeats + r) as u64);
                sbcd(&obj, &alpha0, &SbcdConfig { rng_seed: seed, ..*cfg })
            })
            .collect();
        let mut mean = vec![0.0; layout.len];
        for (r, res) in runs.into_iter().enumerate() {
            let res = res?;
            for (m, a) in mean.iter_mut().zip(&res.alpha) {
                *m += a / repeats as f64;
            }
            trace.extend(res.trace.into_iter().map(|t| TraceRow { window: k, repeat: r, ..t }));
        }
        sim.network.apply_preferences(layout, &mean)?;
        sim.network.resolve_junctions(sim.dt);
        sim.advance_with(window, 1, &mut *hook)?;
        k += 1;
    }
    Ok(())
}

/// Writes an optimization trace as CSV.
pub fn write_trace(path: &std::path::Path, rows: &[TraceRow]) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(f);
    if rows.is_empty() {
        w.write_record(["window", "repeat", "iter", "indices", "p_norm", "tau", "accepted", "loss"])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Quadratic {
        center: Vec<f64>,
    }

    impl Objective for Quadratic {
        fn loss(&self, a: &[f64]) -> Result<f64> {
            Ok(a.iter().zip(&self.center).map(|(x, c)| (x - c) * (x - c)).sum())
        }
        fn horizon_seconds(&self) -> f64 {
            1.0
        }
    }

    #[test]
    fn excess_and_penalty() {
        assert_eq!(boundary_excess(&[0.5, 0.5], 0.01), 0.0);
        assert!((boundary_excess(&[0.5, 1.005], 0.01) - 0.015).abs() < 1e-12);
        let q = Quadratic { center: vec![0.5] };
        assert!((mollified_loss(&q, &[1.005], 0.01).unwrap() - 1.5).abs() < 1e-9);
        assert_eq!(mollified_loss(&q, &[-2.0], 0.01).unwrap(), 100.0);
        assert_eq!(mollified_loss(&q, &[0.5], 0.01).unwrap(), 0.0);
    }

    #[test]
    fn quadratic_converges() {
        let q = Quadratic { center: vec![0.3, 0.6, 0.45] };
        let r = sbcd(&q, &[0.5, 0.5, 0.5], &SbcdConfig::default()).unwrap();
        assert!(r.loss < 1e-3, "{r:?}");
        let accepted: Vec<f64> = r.trace.iter().filter(|t| t.accepted).map(|t| t.loss).collect();
        assert!(accepted.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn deterministic() {
        let q = Quadratic { center: (0..20).map(|i| 0.1 + 0.04 * i as f64).collect() };
        let cfg = SbcdConfig { rng_seed: 7, n_iter: 20, ..Default::default() };
        let a = sbcd(&q, &[0.5; 20], &cfg).unwrap();
        let b = sbcd(&q, &[0.5; 20], &cfg).unwrap();
        assert_eq!(a, b);
    }
}
