//! Five-road toy network and its closed-form solutions.
//!
//! Road 1 feeds a junction splitting into a slow residential route (roads 2
//! and 3 in series) and a fast highway (road 4). Both routes merge into the
//! exit road 5, which has `n5` lanes of road-1 type.
//!
//! Closed forms are returned in the same units as [`MetricsAccumulator`]:
//! vehicles for cars exited and normalized density · mi · s for weighted
//! time-integrated cars. Times passed in are hours.
//!
//! [`MetricsAccumulator`]: crate::metrics::MetricsAccumulator

use serde::{Deserialize, Serialize};

use crate::engine::{EngineConfig, Simulation, SECONDS_PER_HOUR};
use crate::error::{Error, Result};
use crate::flux::{Branch, NormalizedFlux};
use crate::network::{BoundaryConfig, BuildOptions, EndConfig, JunctionConfig, Network, NetworkConfig, RoadConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Experiment {
    /// Free-flow road 1, other roads empty.
    A,
    /// Congested road 1, other roads empty.
    B,
    /// Free-flow roads 1 to 4, exit empty.
    C,
    /// Congested roads 1 to 4, exit empty.
    D,
}

impl std::str::FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Ok(Experiment::A),
            "B" => Ok(Experiment::B),
            "C" => Ok(Experiment::C),
            "D" => Ok(Experiment::D),
            _ => Err(Error::InvalidParameter(format!("unknown experiment {s:?}, expected A, B, C or D"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToyParams {
    pub l1: f64,
    /// Length of each route between the two junctions.
    pub l: f64,
    pub l5: f64,
    pub v1: f64,
    pub v2: f64,
    pub v4: f64,
    /// Capacities in veh/hr/lane.
    pub fc1: f64,
    pub fc2: f64,
    pub fc4: f64,
    pub n5: f64,
    /// Share of road-1 drivers taking the residential route.
    pub alpha: f64,
    /// Per-lane normalized initial density.
    pub rho_init: f64,
    pub rho_jam: f64,
}

impl Default for ToyParams {
    fn default() -> Self {
        ToyParams {
            l1: 0.5,
            l: 1.0,
            l5: 0.5,
            v1: 25.0,
            v2: 15.0,
            v4: 20.0,
            fc1: 500.0,
            fc2: 400.0,
            fc4: 500.0,
            n5: 1.0,
            alpha: 0.5,
            rho_init: 0.9,
            rho_jam: 100.0,
        }
    }
}

/// Toy road identifiers. Roads 2 and 3 are the two halves of the
/// residential route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ToyRoad {
    R1,
    R2,
    R3,
    R4,
    R5,
}

impl ToyRoad {
    pub const ALL: [ToyRoad; 5] = [ToyRoad::R1, ToyRoad::R2, ToyRoad::R3, ToyRoad::R4, ToyRoad::R5];

    pub fn id(self) -> &'static str {
        match self {
            ToyRoad::R1 => "1",
            ToyRoad::R2 => "2",
            ToyRoad::R3 => "3",
            ToyRoad::R4 => "4",
            ToyRoad::R5 => "5",
        }
    }

    /// Exit-distance weight `2^-d`.
    pub fn weight(self) -> f64 {
        match self {
            ToyRoad::R1 | ToyRoad::R2 => 0.25,
            ToyRoad::R3 | ToyRoad::R4 => 0.5,
            ToyRoad::R5 => 1.0,
        }
    }
}

fn pos(s: f64) -> f64 {
    s.max(0.0)
}

impl ToyParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("l1", self.l1),
            ("l", self.l),
            ("l5", self.l5),
            ("v1", self.v1),
            ("v2", self.v2),
            ("v4", self.v4),
            ("fc1", self.fc1),
            ("fc2", self.fc2),
            ("fc4", self.fc4),
            ("n5", self.n5),
            ("rho_jam", self.rho_jam),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("toy parameter {name} must be positive, got {v}")));
            }
        }
        if !(self.v2 < self.v4) {
            return Err(Error::InvalidParameter(format!(
                "residential route must be slower than the highway (v2 = {} ≥ v4 = {})",
                self.v2, self.v4
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!("alpha must be in (0, 1), got {}", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.rho_init) {
            return Err(Error::InvalidParameter(format!("rho_init must be in [0, 1], got {}", self.rho_init)));
        }
        Ok(())
    }

    pub fn flux(&self, road: ToyRoad) -> Result<NormalizedFlux> {
        let (v, fc, n) = match road {
            ToyRoad::R1 => (self.v1, self.fc1, 1.0),
            ToyRoad::R2 | ToyRoad::R3 => (self.v2, self.fc2, 1.0),
            ToyRoad::R4 => (self.v4, self.fc4, 1.0),
            ToyRoad::R5 => (self.v1, self.fc1, self.n5),
        };
        NormalizedFlux::new(v, fc, self.rho_jam, n)
    }

    pub fn length(&self, road: ToyRoad) -> f64 {
        match road {
            ToyRoad::R1 => self.l1,
            ToyRoad::R2 | ToyRoad::R3 => self.l / 2.0,
            ToyRoad::R4 => self.l,
            ToyRoad::R5 => self.l5,
        }
    }

    /// Normalized capacities `f_c / ρ_jam`.
    fn fc_norm(&self) -> (f64, f64, f64) {
        (self.fc1 / self.rho_jam, self.fc2 / self.rho_jam, self.fc4 / self.rho_jam)
    }

    fn sigmas(&self) -> (f64, f64, f64) {
        let (f1, f2, f4) = self.fc_norm();
        (f1 / self.v1, f2 / self.v2, f4 / self.v4)
    }
}

/// Exit-lane threshold `(f_c2 + f_c4) / f_c1`.
pub fn n5_star(p: &ToyParams) -> Result<f64> {
    if !(p.fc1 > 0.0) {
        return Err(Error::InvalidParameter(format!("fc1 must be positive, got {}", p.fc1)));
    }
    Ok((p.fc2 + p.fc4) / p.fc1)
}

/// Network configuration for an experiment.
pub fn network_config(p: &ToyParams, exp: Experiment) -> Result<NetworkConfig> {
    p.validate()?;
    let all = matches!(exp, Experiment::C | Experiment::D);
    let nr = || EndConfig::Boundary(BoundaryConfig::Nonreflecting);
    let j = |s: &str| EndConfig::Junction(s.into());
    let road = |r: ToyRoad, left: EndConfig, right: EndConfig| {
        let (v, fc, n) = match r {
            ToyRoad::R1 => (p.v1, p.fc1, 1.0),
            ToyRoad::R2 | ToyRoad::R3 => (p.v2, p.fc2, 1.0),
            ToyRoad::R4 => (p.v4, p.fc4, 1.0),
            ToyRoad::R5 => (p.v1, p.fc1, p.n5),
        };
        let init = match r {
            ToyRoad::R1 => p.rho_init,
            ToyRoad::R5 => 0.0,
            _ if all => p.rho_init,
            _ => 0.0,
        };
        RoadConfig {
            id: r.id().into(),
            length_mi: p.length(r),
            lanes: n,
            v_f_mph: v,
            f_c_vphpl: fc,
            left,
            right,
            source: false,
            exit: r == ToyRoad::R5,
            init_density: Some(init),
            region: None,
            geometry: Some(match r {
                ToyRoad::R1 => [[0.0, 0.0], [p.l1, 0.0]],
                ToyRoad::R2 => [[p.l1, 0.0], [p.l1 + p.l / 2.0, 0.4]],
                ToyRoad::R3 => [[p.l1 + p.l / 2.0, 0.4], [p.l1 + p.l, 0.0]],
                ToyRoad::R4 => [[p.l1, 0.0], [p.l1 + p.l, 0.0]],
                ToyRoad::R5 => [[p.l1 + p.l, 0.0], [p.l1 + p.l + p.l5, 0.0]],
            }),
        }
    };
    Ok(NetworkConfig {
        name: Some(format!("toy-{exp:?}")),
        roads: vec![
            road(ToyRoad::R1, nr(), j("left")),
            road(ToyRoad::R2, j("left"), j("mid")),
            road(ToyRoad::R3, j("mid"), j("right")),
            road(ToyRoad::R4, j("left"), j("right")),
            road(ToyRoad::R5, j("right"), nr()),
        ],
        junctions: vec![
            JunctionConfig {
                id: "left".into(),
                incoming: vec!["1".into()],
                outgoing: vec!["2".into(), "4".into()],
                alpha: Some(vec![vec![p.alpha], vec![1.0 - p.alpha]]),
            },
            JunctionConfig { id: "mid".into(), incoming: vec!["2".into()], outgoing: vec!["3".into()], alpha: None },
            JunctionConfig {
                id: "right".into(),
                incoming: vec!["3".into(), "4".into()],
                outgoing: vec!["5".into()],
                alpha: Some(vec![vec![1.0, 1.0]]),
            },
        ],
    })
}

pub fn build_network(p: &ToyParams, exp: Experiment, dx_mi: f64) -> Result<Network> {
    Network::build(&network_config(p, exp)?, &BuildOptions { rho_jam: p.rho_jam, dx_target_mi: dx_mi })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToyRun {
    pub cars_exited: f64,
    pub cars_entered: f64,
    pub weighted_time_integrated: f64,
}

/// Runs the engine for `t_sec` seconds.
pub fn simulate(p: &ToyParams, exp: Experiment, t_sec: f64, dx_mi: f64, cfl_nu: f64) -> Result<(ToyRun, Simulation)> {
    let net = build_network(p, exp, dx_mi)?;
    let mut sim = Simulation::new(net, EngineConfig { cfl_nu })?;
    sim.advance(t_sec / SECONDS_PER_HOUR)?;
    let run = ToyRun {
        cars_exited: sim.metrics.cars_exited(),
        cars_entered: sim.metrics.cars_entered(),
        weighted_time_integrated: sim.metrics.weighted_time_integrated(),
    };
    Ok((run, sim))
}

fn assume(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Assumption(what()))
    }
}

/// Checks the hypotheses under which the closed forms for `exp` hold.
pub fn check_assumptions(p: &ToyParams, exp: Experiment, t_hr: f64) -> Result<()> {
    p.validate()?;
    let (f1c, f2c, f4c) = p.fc_norm();
    let (s1, s2, s4) = p.sigmas();
    let r = p.rho_init;
    match exp {
        Experiment::A => {
            assume(r < s1, || format!("(I) rho_init = {r} < sigma_1 = {s1}"))?;
            let f1 = p.v1 * r;
            assume(f1 < f2c && f1 < f4c, || format!("(II) f_1(rho_init) = {f1} < min(f_c2, f_c4) = {}", f2c.min(f4c)))
        }
        Experiment::B => {
            assume(r > s1 && r < 1.0, || format!("(I') rho_init = {r} in (sigma_1 = {s1}, 1)"))?;
            let m = (p.alpha * f1c / f2c).max((1.0 - p.alpha) * f1c / f4c);
            assume(m < 1.0, || format!("(II') max(alpha f_c1 / f_c2, (1 - alpha) f_c1 / f_c4) = {m} < 1"))
        }
        Experiment::C => {
            assume(r < s1 && r < s2 && r < s4, || {
                format!("rho_init = {r} < sigma_i = ({s1}, {s2}, {s4}) for roads 1, 2, 4")
            })?;
            let (f1, f2, f4) = (p.v1 * r, p.v2 * r, p.v4 * r);
            let m = (f2 + f4).max(f2 + (1.0 - p.alpha) * f1).max(f1);
            let fc5 = p.n5 * f1c;
            assume(m < fc5, || format!("exit not binding: {m} < f_c5 = {fc5}"))
        }
        Experiment::D => {
            assume(r > s1 && r > s2 && r > s4, || {
                format!("rho_init = {r} > sigma_i = ({s1}, {s2}, {s4}) for roads 1, 2, 4")
            })?;
            let (g2, g4) = gamma24_d(p)?;
            let bound = (r * p.l / g2).min(r * p.l / g4);
            assume(t_hr <= bound, || {
                format!(
                    "non-depletion T = {:.1} s <= min(rho_init L / gamma_2, rho_init L / gamma_4) = {:.1} s",
                    t_hr * SECONDS_PER_HOUR,
                    bound * SECONDS_PER_HOUR
                )
            })
        }
    }
}

/// Right-junction incoming fluxes `(γ₂, γ₄)` in the congested experiment.
pub fn gamma24_d(p: &ToyParams) -> Result<(f64, f64)> {
    let (_, f2c, f4c) = p.fc_norm();
    let ns = n5_star(p)?;
    Ok(if p.n5 < ns { (p.n5 / ns * f2c, p.n5 / ns * f4c) } else { (f2c, f4c) })
}

/// Cars exited by time `t_hr`, in vehicles.
pub fn cars_exited_closed_form(p: &ToyParams, exp: Experiment, t_hr: f64) -> Result<f64> {
    check_assumptions(p, exp, t_hr)?;
    let (f1c, f2c, f4c) = p.fc_norm();
    let (t5, t4, t2) = (p.l5 / p.v1, p.l / p.v4, p.l / p.v2);
    let a = p.alpha;
    let norm = match exp {
        Experiment::A | Experiment::B => {
            let f1 = if exp == Experiment::A { p.v1 * p.rho_init } else { f1c };
            (1.0 - a) * f1 * pos(t_hr - t4 - t5) + a * f1 * pos(t_hr - t2 - t5)
        }
        Experiment::C => {
            let r = p.rho_init;
            let (f1, f2, f4) = (p.v1 * r, p.v2 * r, p.v4 * r);
            (f2 + f4) * pos(t_hr - t5) + ((1.0 - a) * f1 - f4) * pos(t_hr - t5 - t4) + (a * f1 - f2) * pos(t_hr - t5 - t2)
        }
        Experiment::D => pos(t_hr - t5) * (p.n5 * f1c).min(f2c + f4c),
    };
    Ok(p.rho_jam * norm)
}

/// Right-junction outflow `γ₅(t)` (normalized) in the free-flow experiment C.
pub fn gamma5_c(p: &ToyParams, t_hr: f64) -> f64 {
    let r = p.rho_init;
    let (f1, f2, f4) = (p.v1 * r, p.v2 * r, p.v4 * r);
    if t_hr < p.l / p.v4 {
        f2 + f4
    } else if t_hr < p.l / p.v2 {
        f2 + (1.0 - p.alpha) * f1
    } else {
        f1
    }
}

/// `∫₀ᵀ min(v s₊, L) dt` for `s = t − t0`: mass of a front moving at `v`
/// from time `t0` into a road of length `L`, per unit density.
fn front_integral(t: f64, t0: f64, v: f64, len: f64) -> f64 {
    let s = pos(t - t0);
    let tf = len / v;
    v * (0.5 * s.min(tf).powi(2) + tf * pos(s - tf))
}

/// Road-1 fan for experiment B: `(speed of the fan's left edge, time it
/// reaches x = 0)`. The edge speed is `f₁'(ρ_init) = 2A₁(ρ_init − σ₁) < 0`.
fn fan_edge(p: &ToyParams) -> Result<(f64, f64)> {
    let f = p.flux(ToyRoad::R1)?;
    let s = 2.0 * f.a_norm() * (p.rho_init - f.sigma_norm());
    Ok((s, p.l1 / -s))
}

/// Per-road weighted time integrals `[W₁, …, W₅]` (roads 2 and 3 split at
/// L/2), normalized density · mi · s.
pub fn weighted_cars_per_road(p: &ToyParams, exp: Experiment, t_hr: f64) -> Result<[f64; 5]> {
    if matches!(exp, Experiment::C | Experiment::D) {
        return Err(Error::Unsupported(format!("weighted closed form for experiment {exp:?}")));
    }
    check_assumptions(p, exp, t_hr)?;
    let t = t_hr;
    let a = p.alpha;
    let f1 = p.flux(ToyRoad::R1)?;
    // Density that leaves road 1 and feeds the routes.
    let rho_out = if exp == Experiment::A { p.rho_init } else { f1.sigma_norm() };
    let q = p.v1 * rho_out;
    let (l, l5) = (p.l, p.l5);
    let h = l / (2.0 * p.v2);

    let w1 = match exp {
        Experiment::A => 0.25 * p.rho_init * t * p.l1,
        _ => {
            let (_, ts) = fan_edge(p)?;
            let k = f1.a_norm() * (p.rho_init - f1.sigma_norm()).powi(2);
            let tt = t.min(ts);
            let mut m = p.rho_init * p.l1 * tt + 0.5 * k * tt * tt;
            if t > ts {
                m += f1.sigma_norm() * p.l1 * (t - ts) - p.l1 * p.l1 / (4.0 * f1.a_norm()) * (t / ts).ln();
            }
            0.25 * m
        }
    };
    let w2 = a * q / 8.0 * t.min(h).powi(2) + a * q / (8.0 * p.v2) * l * pos(t - h);
    let w3 = a * q / 4.0 * (pos(t - h).powi(2) - pos(t - 2.0 * h).powi(2));
    let w4 = (1.0 - a) * q / 4.0 * t.min(l / p.v4).powi(2) + (1.0 - a) * q / (2.0 * p.v4) * l * pos(t - l / p.v4);
    let w5 = (1.0 - a) * rho_out * front_integral(t, l / p.v4, p.v1, l5) + a * rho_out * front_integral(t, l / p.v2, p.v1, l5);
    Ok([w1, w2, w3, w4, w5].map(|w| w * SECONDS_PER_HOUR))
}

pub fn weighted_cars_closed_form(p: &ToyParams, exp: Experiment, t_hr: f64) -> Result<f64> {
    Ok(weighted_cars_per_road(p, exp, t_hr)?.iter().sum())
}

/// Closed-form density on `road` at time `t_hr` and position `x` (road-local
/// coordinates, lane-scaled normalized density).
pub fn density_profile(p: &ToyParams, exp: Experiment, road: ToyRoad, t_hr: f64, x: f64) -> Result<f64> {
    if matches!(exp, Experiment::C | Experiment::D) {
        return Err(Error::Unsupported(format!("density profile for experiment {exp:?}")));
    }
    check_assumptions(p, exp, t_hr)?;
    let t = t_hr;
    let f1 = p.flux(ToyRoad::R1)?;
    let rho_out = if exp == Experiment::A { p.rho_init } else { f1.sigma_norm() };
    let q = p.v1 * rho_out;
    let a = p.alpha;
    Ok(match road {
        ToyRoad::R1 => {
            if exp == Experiment::A {
                p.rho_init
            } else {
                let (s, _) = fan_edge(p)?;
                if t <= 0.0 || x < p.l1 + s * t {
                    p.rho_init
                } else {
                    f1.sigma_norm() + (x - p.l1) / (2.0 * f1.a_norm() * t)
                }
            }
        }
        ToyRoad::R2 | ToyRoad::R3 => {
            let xe = if road == ToyRoad::R2 { x } else { x + p.l / 2.0 };
            if xe < p.v2 * t {
                a * q / p.v2
            } else {
                0.0
            }
        }
        ToyRoad::R4 => {
            if x < p.v4 * t {
                (1.0 - a) * q / p.v4
            } else {
                0.0
            }
        }
        ToyRoad::R5 => {
            if x < p.v1 * (t - p.l / p.v2) {
                rho_out
            } else if x < p.v1 * (t - p.l / p.v4) {
                (1.0 - a) * rho_out
            } else {
                0.0
            }
        }
    })
}

/// Positions where the profile on `road` is discontinuous or kinked.
fn profile_breaks(p: &ToyParams, exp: Experiment, road: ToyRoad, t: f64) -> Vec<f64> {
    let len = p.length(road);
    let raw = match road {
        ToyRoad::R1 if exp == Experiment::B => fan_edge(p).map(|(s, _)| vec![p.l1 + s * t]).unwrap_or_default(),
        ToyRoad::R1 => vec![],
        ToyRoad::R2 => vec![p.v2 * t],
        ToyRoad::R3 => vec![p.v2 * t - p.l / 2.0],
        ToyRoad::R4 => vec![p.v4 * t],
        ToyRoad::R5 => vec![p.v1 * (t - p.l / p.v2), p.v1 * (t - p.l / p.v4)],
    };
    let mut b: Vec<f64> = std::iter::once(0.0).chain(raw.into_iter().filter(|&v| v > 0.0 && v < len)).chain([len]).collect();
    b.sort_by(f64::total_cmp);
    b
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let d = left + right - whole;
    if depth == 0 || d.abs() <= 15.0 * tol {
        left + right + d / 15.0
    } else {
        simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(&f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Weighted time integral of the closed-form profiles by numerical
/// quadrature in `x` and `t`: an independent check of
/// [`weighted_cars_per_road`].
pub fn weighted_cars_quadrature(p: &ToyParams, exp: Experiment, t_hr: f64) -> Result<[f64; 5]> {
    check_assumptions(p, exp, t_hr)?;
    // The profiles are only evaluated where the assumptions hold; check once
    // so the closures below can unwrap.
    density_profile(p, exp, ToyRoad::R1, t_hr, 0.0)?;
    let mut out = [0.0; 5];
    for (k, road) in ToyRoad::ALL.into_iter().enumerate() {
        let mass = |t: f64| {
            let b = profile_breaks(p, exp, road, t);
            b.windows(2)
                .map(|w| integrate(|x| density_profile(p, exp, road, t, x).unwrap(), w[0], w[1], 1e-13))
                .sum::<f64>()
        };
        let mut kinks = vec![0.0, t_hr];
        let ts = [
            p.l / (2.0 * p.v2),
            p.l / p.v2,
            p.l / p.v4,
            p.l / p.v4 + p.l5 / p.v1,
            p.l / p.v2 + p.l5 / p.v1,
            p.l1 / p.v1,
        ];
        kinks.extend(ts.into_iter().filter(|&v| v > 0.0 && v < t_hr));
        if exp == Experiment::B {
            let (_, t_fan) = fan_edge(p)?;
            if t_fan < t_hr {
                kinks.push(t_fan);
            }
        }
        kinks.sort_by(f64::total_cmp);
        let total: f64 = kinks.windows(2).map(|w| integrate(mass, w[0], w[1], 1e-12)).sum();
        out[k] = road.weight() * total * SECONDS_PER_HOUR;
    }
    Ok(out)
}

/// Junction states at the right junction in the congested experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RarefactionDiagnostics {
    pub n5: f64,
    pub n5_star: f64,
    pub gamma2: f64,
    pub gamma4: f64,
    pub rho_hat2: f64,
    pub rho_hat4: f64,
    /// `f_i(ρ_init)` for roads 2 and 4.
    pub f2_init: f64,
    pub f4_init: f64,
    /// Backward waves are rarefactions iff `γ_i > f_i(ρ_init)`.
    pub rarefaction2: bool,
    pub rarefaction4: bool,
}

pub fn rarefaction_diagnostics(p: &ToyParams, n5: f64) -> Result<RarefactionDiagnostics> {
    let q = ToyParams { n5, ..*p };
    q.validate()?;
    let (g2, g4) = gamma24_d(&q)?;
    let (f2, f4) = (q.flux(ToyRoad::R2)?, q.flux(ToyRoad::R4)?);
    let ns = n5_star(&q)?;
    let (rho_hat2, rho_hat4) = if n5 < ns {
        (f2.inverse(g2, Branch::Congested)?, f4.inverse(g4, Branch::Congested)?)
    } else {
        (f2.sigma_norm(), f4.sigma_norm())
    };
    let (f2_init, f4_init) = (f2.eval(q.rho_init)?, f4.eval(q.rho_init)?);
    Ok(RarefactionDiagnostics {
        n5,
        n5_star: ns,
        gamma2: g2,
        gamma4: g4,
        rho_hat2,
        rho_hat4,
        f2_init,
        f4_init,
        rarefaction2: g2 > f2_init,
        rarefaction4: g4 > f4_init,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hr(s: f64) -> f64 {
        s / SECONDS_PER_HOUR
    }

    #[test]
    fn threshold() {
        assert!((n5_star(&ToyParams::default()).unwrap() - 1.8).abs() < 1e-15);
        let p = ToyParams { fc2: 500.0, ..Default::default() };
        assert_eq!(n5_star(&p).unwrap(), 2.0);
    }

    #[test]
    fn congested_closed_form_n5_1() {
        let p = ToyParams::default();
        let c = cars_exited_closed_form(&p, Experiment::D, hr(1000.0)).unwrap();
        assert!((c - 500.0 * (1000.0 / 3600.0 - 0.02)).abs() < 1e-9);
        // Road 4 drains in 648 s at full capacity.
        let p2 = ToyParams { n5: 2.0, ..p };
        assert!(matches!(cars_exited_closed_form(&p2, Experiment::D, hr(1000.0)), Err(Error::Assumption(_))));
        assert!(cars_exited_closed_form(&p2, Experiment::D, hr(600.0)).is_ok());
    }

    #[test]
    fn nothing_exits_before_travel_time() {
        let free = ToyParams { rho_init: 0.1, ..Default::default() };
        for (p, e) in [(free, Experiment::A), (ToyParams::default(), Experiment::B), (free, Experiment::C), (ToyParams::default(), Experiment::D)] {
            assert_eq!(cars_exited_closed_form(&p, e, 0.5 / 25.0).unwrap(), 0.0, "{e:?}");
        }
    }

    #[test]
    fn assumption_errors_name_the_inequality() {
        let p = ToyParams::default();
        let e = cars_exited_closed_form(&p, Experiment::A, 0.1).unwrap_err().to_string();
        assert!(e.contains("(I)"), "{e}");
        let e = density_profile(&p, Experiment::C, ToyRoad::R1, 0.1, 0.0).unwrap_err();
        assert!(matches!(e, Error::Unsupported(_)));
    }

    #[test]
    fn full_alpha_keeps_residential_term_only() {
        let p = ToyParams { rho_init: 0.1, alpha: 0.999_999, ..Default::default() };
        let t = hr(1000.0);
        let c = cars_exited_closed_form(&p, Experiment::A, t).unwrap();
        let only = p.rho_jam * p.v1 * p.rho_init * (t - p.l / p.v2 - p.l5 / p.v1);
        assert!((c - only).abs() < 1e-3);
    }

    #[test]
    fn fan_foot_is_critical() {
        let p = ToyParams::default();
        let s1 = p.flux(ToyRoad::R1).unwrap().sigma_norm();
        for t in [0.001, 0.01, 0.1] {
            let r = density_profile(&p, Experiment::B, ToyRoad::R1, t, p.l1).unwrap();
            assert!((r - s1).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_forms_match_quadrature() {
        let cases = [(ToyParams { rho_init: 0.1, ..Default::default() }, Experiment::A), (ToyParams::default(), Experiment::B)];
        for (p, e) in cases {
            for ts in [0.0, 30.0, 100.0, 150.0, 250.0, 500.0, 1000.0] {
                let a = weighted_cars_per_road(&p, e, hr(ts)).unwrap();
                let b = weighted_cars_quadrature(&p, e, hr(ts)).unwrap();
                for k in 0..5 {
                    assert!((a[k] - b[k]).abs() <= 1e-6 * a[k].abs().max(1.0), "{e:?} t={ts} road {} {} {}", k + 1, a[k], b[k]);
                }
            }
        }
    }

    #[test]
    fn rarefaction_states() {
        let p = ToyParams { rho_jam: 200.0, ..Default::default() };
        let d = rarefaction_diagnostics(&p, 1.0).unwrap();
        assert!((d.rho_hat2 - 0.71).abs() < 0.005 && (d.rho_hat4 - 0.71).abs() < 0.005);
        assert!(d.rarefaction2 && d.rarefaction4);
        assert!((d.f2_init - 147.0 / 676.0 * 2.0).abs() < 1e-12);
        let d = rarefaction_diagnostics(&p, 2.0).unwrap();
        assert!((d.rho_hat2 - 2.0 / 15.0).abs() < 1e-12 && (d.rho_hat4 - 0.125).abs() < 1e-12);
    }
}
