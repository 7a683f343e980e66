//! Piecewise linear-quadratic fundamental diagram.
//!
//! Densities are normalized by the jam density and scaled by the lane count,
//! so a road with `n` lanes lives on `[0, n]`:
//!
//! ```text
//! f(ρ) = v_f ρ                          0 ≤ ρ ≤ nσ
//! f(ρ) = (A/n)(ρ − nσ)² + n f_c        nσ < ρ ≤ n
//! ```
//!
//! with `f_c = f_max / ρ_jam`, `σ = f_c / v_f` and `A = −f_c / (1 − σ)²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default jam density in vehicles per mile per lane.
pub const RHO_JAM_DEFAULT: f64 = 200.0;

/// Slack allowed when checking densities against `[0, n]`.
pub const DENSITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Free,
    Congested,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedFlux {
    v_f: f64,
    f_c_norm: f64,
    sigma_norm: f64,
    a_norm: f64,
    lanes: f64,
    rho_jam: f64,
}

impl NormalizedFlux {
    /// Builds the flux from a speed limit (mph), a per-lane capacity
    /// (veh/hr/lane), the jam density (veh/mi/lane) and a lane count.
    pub fn new(v_f: f64, f_c: f64, rho_jam: f64, lanes: f64) -> Result<Self> {
        for (name, v) in [("v_f", v_f), ("f_c", f_c), ("rho_jam", rho_jam), ("lanes", lanes)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if lanes < 1.0 {
            return Err(Error::InvalidParameter(format!("lanes must be at least 1, got {lanes}")));
        }
        if f_c >= v_f * rho_jam {
            return Err(Error::InvalidParameter(format!(
                "capacity {f_c} veh/hr must be below v_f*rho_jam = {}",
                v_f * rho_jam
            )));
        }
        let f_c_norm = f_c / rho_jam;
        let sigma_norm = f_c_norm / v_f;
        let a_norm = -f_c_norm / ((1.0 - sigma_norm) * (1.0 - sigma_norm));
        Ok(NormalizedFlux { v_f, f_c_norm, sigma_norm, a_norm, lanes, rho_jam })
    }

    /// Same per-lane characteristics with a different lane count.
    pub fn with_lanes(&self, lanes: f64) -> Result<Self> {
        NormalizedFlux::new(self.v_f, self.f_c_norm * self.rho_jam, self.rho_jam, lanes)
    }

    pub fn v_f(&self) -> f64 {
        self.v_f
    }

    pub fn f_c_norm(&self) -> f64 {
        self.f_c_norm
    }

    pub fn sigma_norm(&self) -> f64 {
        self.sigma_norm
    }

    pub fn a_norm(&self) -> f64 {
        self.a_norm
    }

    pub fn lanes(&self) -> f64 {
        self.lanes
    }

    pub fn rho_jam(&self) -> f64 {
        self.rho_jam
    }

    /// Maximum flux `n f_c`.
    pub fn capacity(&self) -> f64 {
        self.lanes * self.f_c_norm
    }

    /// Critical density `n σ`.
    pub fn critical(&self) -> f64 {
        self.lanes * self.sigma_norm
    }

    /// Per-lane quadratic branch expanded as `aρ² + bρ + c`.
    pub fn quadratic_coefficients(&self) -> (f64, f64, f64) {
        let a = self.a_norm;
        let s = self.sigma_norm;
        (a, -2.0 * a * s, a * s * s + self.f_c_norm)
    }

    /// Flux value without a domain check. Callers in the solver loop keep
    /// densities in range themselves.
    #[inline]
    pub fn value(&self, rho: f64) -> f64 {
        let crit = self.critical();
        if rho <= crit {
            self.v_f * rho
        } else {
            let d = rho - crit;
            self.a_norm / self.lanes * d * d + self.capacity()
        }
    }

    pub fn eval(&self, rho: f64) -> Result<f64> {
        self.check(rho)?;
        Ok(self.value(rho))
    }

    /// `f'(ρ)`, taking the left derivative `v_f` at the kink.
    pub fn derivative(&self, rho: f64) -> f64 {
        let crit = self.critical();
        if rho <= crit {
            self.v_f
        } else {
            2.0 * self.a_norm / self.lanes * (rho - crit)
        }
    }

    /// Largest characteristic speed `max(v_f, 2 f_c / (1 − σ))`.
    pub fn max_wave_speed(&self) -> f64 {
        self.v_f.max(2.0 * self.f_c_norm / (1.0 - self.sigma_norm))
    }

    pub fn inverse(&self, gamma: f64, branch: Branch) -> Result<f64> {
        let cap = self.capacity();
        if !(gamma >= -DENSITY_SLACK) || gamma > cap * (1.0 + 1e-12) + 1e-15 {
            return Err(Error::InfeasibleFlux { gamma, capacity: cap });
        }
        Ok(self.inverse_clamped(gamma, branch))
    }

    /// Inverse with `γ` clamped into `[0, n f_c]`.
    #[inline]
    pub fn inverse_clamped(&self, gamma: f64, branch: Branch) -> f64 {
        let cap = self.capacity();
        let gamma = gamma.clamp(0.0, cap);
        match branch {
            Branch::Free => (gamma / self.v_f).min(self.critical()),
            Branch::Congested => {
                let r = ((cap - gamma) * self.lanes / (-self.a_norm)).max(0.0).sqrt();
                (self.critical() + r).min(self.lanes)
            }
        }
    }

    /// Density on the opposite branch carrying the same flux.
    pub fn tau(&self, rho: f64) -> Result<f64> {
        self.check(rho)?;
        let g = self.value(rho);
        Ok(if rho < self.critical() {
            self.inverse_clamped(g, Branch::Congested)
        } else if rho > self.critical() {
            self.inverse_clamped(g, Branch::Free)
        } else {
            rho
        })
    }

    /// Which side of the kink `ρ` sits on; the kink itself counts as congested.
    #[inline]
    pub fn branch(&self, rho: f64) -> Branch {
        if rho < self.critical() {
            Branch::Free
        } else {
            Branch::Congested
        }
    }

    /// Sending capacity of a cell at density `ρ`.
    #[inline]
    pub fn demand(&self, rho: f64, dt: f64) -> f64 {
        match self.branch(rho) {
            Branch::Free => self.value(rho).min(rho / dt),
            Branch::Congested => self.capacity(),
        }
    }

    /// Receiving capacity of a cell at density `ρ`.
    #[inline]
    pub fn supply(&self, rho: f64, dt: f64) -> f64 {
        match self.branch(rho) {
            Branch::Free => self.capacity(),
            Branch::Congested => self.value(rho).min((self.lanes - rho) / dt),
        }
    }

    /// Speed relative to free flow, `f(ρ) / (ρ v_f)`, with 1 at an empty road.
    pub fn speed_ratio(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            1.0
        } else {
            self.value(rho) / (rho * self.v_f)
        }
    }

    fn check(&self, rho: f64) -> Result<()> {
        if rho.is_nan() || rho < -DENSITY_SLACK || rho > self.lanes + DENSITY_SLACK {
            Err(Error::DensityOutOfRange { rho, lanes: self.lanes })
        } else {
            Ok(())
        }
    }
}

/// Godunov interface flux from the exact Riemann solution: the minimum of
/// `f` over `[ρ_l, ρ_r]` when `ρ_l ≤ ρ_r`, the maximum over `[ρ_r, ρ_l]`
/// otherwise.
#[inline]
pub fn riemann_flux(flux: &NormalizedFlux, rho_l: f64, rho_r: f64) -> f64 {
    let fl = flux.value(rho_l);
    let fr = flux.value(rho_r);
    if rho_l <= rho_r {
        fl.min(fr)
    } else {
        let crit = flux.critical();
        if rho_r <= crit && crit <= rho_l {
            flux.capacity()
        } else {
            fl.max(fr)
        }
    }
}
