//! Flux functions and initial densities from road tables.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::NormalizedFlux;
use crate::metrics::Los;

/// Share of daily traffic in the peak hour.
const PEAK_HOUR_FACTOR: f64 = 0.1;
/// Share of peak-hour traffic in the peak direction.
const DIRECTIONAL_FACTOR: f64 = 0.57;

/// One row of the bundled road tables, with the printed per-lane normalized
/// flux coefficients kept for cross-checking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoadRecord {
    pub table: String,
    pub id: String,
    pub segment: String,
    pub length_mi: f64,
    pub lanes: f64,
    pub speed_limit_mph: f64,
    pub road_class: String,
    pub f_max_vphpl: f64,
    /// Printed critical density.
    pub sigma: f64,
    /// Printed `[a, b, c]` of the congested branch `aρ² + bρ + c`.
    pub quadratic: [f64; 3],
}

impl RoadRecord {
    /// Single-lane normalized flux for the record.
    pub fn flux(&self, rho_jam: f64) -> Result<NormalizedFlux> {
        NormalizedFlux::new(self.speed_limit_mph, self.f_max_vphpl, rho_jam, 1.0)
    }
}

/// One row of the initial-density table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitRecord {
    pub road: String,
    pub segment: String,
    pub aadt: Option<f64>,
    pub los: Los,
    pub v0_mph: f64,
    /// Printed normalized initial density per lane.
    pub rho0: f64,
    pub v_f_mph: f64,
    pub f_max_vphpl: f64,
    pub lanes: f64,
    /// Road ids the row applies to.
    #[serde(default)]
    pub segments: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct Records<T> {
    records: Vec<T>,
}

fn load<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let r: Records<T> = serde_json::from_str(&text).map_err(|e| Error::Json { path: path.into(), source: e })?;
    Ok(r.records)
}

pub fn load_lahaina_tables(path: impl AsRef<Path>) -> Result<Vec<RoadRecord>> {
    load(path.as_ref())
}

pub fn load_init_table(path: impl AsRef<Path>) -> Result<Vec<InitRecord>> {
    load(path.as_ref())
}

/// Average-to-free-flow speed ratio per level of service.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LosAlphaTable {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
}

impl Default for LosAlphaTable {
    fn default() -> Self {
        LosAlphaTable { a: 1.0, b: 0.7, c: 0.5, d: 0.4, e: 0.25 }
    }
}

impl LosAlphaTable {
    pub fn alpha(&self, los: Los) -> f64 {
        match los {
            Los::A => self.a,
            Los::B => self.b,
            Los::C => self.c,
            Los::D => self.d,
            Los::E => self.e,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let v = [self.a, self.b, self.c, self.d, self.e];
        if self.a != 1.0 {
            return Err(Error::InvalidParameter(format!("LOS A ratio must be 1, got {}", self.a)));
        }
        if v.windows(2).any(|w| w[1] >= w[0]) || self.e <= 0.0 {
            return Err(Error::InvalidParameter(format!("LOS ratios must strictly decrease in (0, 1], got {v:?}")));
        }
        Ok(())
    }
}

/// Normalized per-lane initial density.
///
/// LOS A uses the AADT estimate `AADT · 0.1 · 0.57 / (n ρ_j v_f)`. Other
/// levels solve `f̃(ρ) = α v_f ρ` on the congested branch.
pub fn init_density(los: Los, aadt: Option<f64>, flux: &NormalizedFlux, alphas: &LosAlphaTable) -> Result<f64> {
    let alpha = alphas.alpha(los);
    if los == Los::A {
        let aadt = aadt.ok_or_else(|| Error::InvalidParameter("LOS A needs an AADT value".into()))?;
        if aadt < 0.0 {
            return Err(Error::InvalidParameter(format!("negative AADT {aadt}")));
        }
        return Ok(aadt * PEAK_HOUR_FACTOR * DIRECTIONAL_FACTOR / (flux.lanes() * flux.rho_jam() * flux.v_f()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("LOS {los:?} needs a speed ratio in (0, 1), got {alpha}")));
    }
    let (v, fc, s, a) = (flux.v_f(), flux.f_c_norm(), flux.sigma_norm(), flux.a_norm());
    let h = alpha * v / (2.0 * a);
    Ok(h + s + (fc / a * (alpha - 1.0) + h * h).sqrt())
}

/// Initial density for a table row.
pub fn init_density_for(rec: &InitRecord, rho_jam: f64, alphas: &LosAlphaTable) -> Result<f64> {
    let flux = NormalizedFlux::new(rec.v_f_mph, rec.f_max_vphpl, rho_jam, 1.0)?;
    init_density(rec.los, rec.aadt, &flux, alphas)
}
