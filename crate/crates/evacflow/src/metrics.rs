//! Weighted time-integrated cars, cars entered/exited, level of service and
//! the CSV/SVG exports.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::engine::{StepFlux, SECONDS_PER_HOUR};
use crate::error::{Error, Result};
use crate::flux::NormalizedFlux;
use crate::network::Network;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MetricsAccumulator {
    /// `Σ_i w_i ∫∫ ρ_i dx dt`, normalized density · mi · hr.
    weighted: f64,
    /// Per-road `W_i`, same units.
    per_road: Vec<f64>,
    /// `∫ F dt` through boundary inlets and outlets, normalized density · mi.
    entered: f64,
    exited: f64,
    rho_jam: f64,
}

impl MetricsAccumulator {
    pub fn new(net: &Network) -> Self {
        MetricsAccumulator { per_road: vec![0.0; net.roads.len()], rho_jam: net.rho_jam, ..Default::default() }
    }

    /// Rectangle rule in time over a step of length `h` hours starting from
    /// the current state; midpoint rule in space.
    pub fn accumulate_state(&mut self, net: &Network, h: f64) {
        if self.per_road.len() != net.roads.len() {
            self.per_road.resize(net.roads.len(), 0.0);
        }
        for (w, r) in self.per_road.iter_mut().zip(&net.roads) {
            if r.weight == 0.0 {
                continue;
            }
            let v = r.weight * r.mass() * h;
            *w += v;
            self.weighted += v;
        }
    }

    pub fn accumulate_flux(&mut self, f: StepFlux, h: f64) {
        self.entered += f.entered * h;
        self.exited += f.exited * h;
    }

    /// Reported in normalized density · mi · s, the units of the paper's
    /// tables.
    pub fn weighted_time_integrated(&self) -> f64 {
        self.weighted * SECONDS_PER_HOUR
    }

    pub fn per_road(&self) -> Vec<f64> {
        self.per_road.iter().map(|w| w * SECONDS_PER_HOUR).collect()
    }

    pub fn cars_entered(&self) -> f64 {
        self.entered * self.rho_jam
    }

    pub fn cars_exited(&self) -> f64 {
        self.exited * self.rho_jam
    }

    /// Loss used by the optimizer: minus the weighted integral.
    pub fn loss(&self) -> f64 {
        -self.weighted_time_integrated()
    }

    pub fn row(&self, t_sec: f64) -> SeriesRow {
        SeriesRow {
            t_sec,
            weighted_time_integrated: self.weighted_time_integrated(),
            cars_entered: self.cars_entered(),
            cars_exited: self.cars_exited(),
        }
    }

    /// Adds another accumulator's totals (per-road values by position only
    /// when both cover the same roads).
    pub fn absorb(&mut self, other: &MetricsAccumulator) {
        self.weighted += other.weighted;
        self.entered += other.entered;
        self.exited += other.exited;
        if self.per_road.len() == other.per_road.len() {
            for (a, b) in self.per_road.iter_mut().zip(&other.per_road) {
                *a += b;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct SeriesRow {
    pub t_sec: f64,
    pub weighted_time_integrated: f64,
    pub cars_entered: f64,
    pub cars_exited: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, serde::Deserialize)]
pub enum Los {
    A,
    B,
    C,
    D,
    E,
}

impl Los {
    pub fn letter(self) -> char {
        match self {
            Los::A => 'A',
            Los::B => 'B',
            Los::C => 'C',
            Los::D => 'D',
            Los::E => 'E',
        }
    }

    /// Heatmap color, green through red.
    pub fn color(self) -> &'static str {
        match self {
            Los::A => "#1a9850",
            Los::B => "#91cf60",
            Los::C => "#fee08b",
            Los::D => "#fc8d59",
            Los::E => "#d73027",
        }
    }
}

/// Level of service from the speed ratio `f(ρ)/(ρ v_f)`.
pub fn los_classify(flux: &NormalizedFlux, rho: f64) -> Los {
    let a = flux.speed_ratio(rho);
    if a >= 1.0 - 1e-9 {
        Los::A
    } else if a >= 0.7 {
        Los::B
    } else if a >= 0.5 {
        Los::C
    } else if a >= 0.4 {
        Los::D
    } else {
        Los::E
    }
}

pub fn write_series(path: &Path, rows: &[SeriesRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["t_sec", "weighted_time_integrated", "cars_entered", "cars_exited"])?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new().has_headers(false).from_writer(f))
}

#[derive(Debug, Serialize)]
struct HeatRow<'a> {
    road_id: &'a str,
    cell_index: usize,
    x_mi: f64,
    rho: f64,
    los: char,
}

/// Writes `<stem>.csv` and `<stem>.svg` for the current state.
pub fn export_heatmap(dir: &Path, stem: &str, net: &Network) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let mut w = csv_writer(&csv_path)?;
    w.write_record(["road_id", "cell_index", "x_mi", "rho", "los"])?;
    for r in &net.roads {
        for (m, &rho) in r.rho.iter().enumerate() {
            w.serialize(HeatRow {
                road_id: &r.id,
                cell_index: m,
                x_mi: r.cell_center(m),
                rho,
                los: los_classify(&r.flux, rho).letter(),
            })?;
        }
    }
    w.flush().map_err(|e| Error::io(&csv_path, e))?;

    let svg_path = dir.join(format!("{stem}.svg"));
    let svg = render_svg(net);
    let mut f = std::fs::File::create(&svg_path).map_err(|e| Error::io(&svg_path, e))?;
    f.write_all(svg.as_bytes()).map_err(|e| Error::io(&svg_path, e))?;
    Ok(())
}

/// Roads with geometry are drawn between their endpoints; the rest are
/// stacked as horizontal strips below.
pub fn render_svg(net: &Network) -> String {
    const W: f64 = 800.0;
    const PAD: f64 = 20.0;
    let placed: Vec<_> = net.roads.iter().filter_map(|r| r.geometry).collect();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for g in &placed {
        for p in g {
            x0 = x0.min(p[0]);
            x1 = x1.max(p[0]);
            y0 = y0.min(p[1]);
            y1 = y1.max(p[1]);
        }
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let scale = (W - 2.0 * PAD) / span;
    let map_h = if placed.is_empty() { 0.0 } else { (y1 - y0) * scale + 2.0 * PAD };
    let unplaced = net.roads.iter().filter(|r| r.geometry.is_none()).count();
    let longest = net.roads.iter().filter(|r| r.geometry.is_none()).map(|r| r.length).fold(0.0, f64::max).max(1e-9);
    let strip = 14.0;
    let h = map_h + unplaced as f64 * strip + 2.0 * PAD;

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{h:.1}" viewBox="0 0 {W} {h:.1}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let mut row = 0usize;
    for r in &net.roads {
        let m = r.rho.len() as f64;
        let (ax, ay, bx, by, width) = match r.geometry {
            Some([[gx0, gy0], [gx1, gy1]]) => (
                PAD + (gx0 - x0) * scale,
                PAD + (y1 - gy0) * scale,
                PAD + (gx1 - x0) * scale,
                PAD + (y1 - gy1) * scale,
                3.0 + r.flux.lanes(),
            ),
            None => {
                let y = map_h + PAD + row as f64 * strip + strip / 2.0;
                row += 1;
                let x = 120.0;
                let _ = writeln!(s, r#"<text x="4" y="{:.1}" font-size="9">{}</text>"#, y + 3.0, xml_escape(&r.id));
                (x, y, x + (W - x - PAD) * r.length / longest, y, 8.0)
            }
        };
        let _ = write!(s, r#"<g id="{}" stroke-width="{width:.1}" stroke-linecap="butt">"#, xml_escape(&r.id));
        for (k, &rho) in r.rho.iter().enumerate() {
            let (t0, t1) = (k as f64 / m, (k + 1) as f64 / m);
            let _ = write!(
                s,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}"/>"#,
                ax + (bx - ax) * t0,
                ay + (by - ay) * t0,
                ax + (bx - ax) * t1,
                ay + (by - ay) * t1,
                los_classify(&r.flux, rho).color()
            );
        }
        let _ = writeln!(s, "</g>");
    }
    let _ = writeln!(s, "</svg>");
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn los_thresholds() {
        let f = NormalizedFlux::new(35.0, 875.0, 200.0, 1.0).unwrap();
        assert_eq!(los_classify(&f, 0.0), Los::A);
        assert_eq!(los_classify(&f, 0.1), Los::A);
        assert_eq!(los_classify(&f, 0.125), Los::A);
        // The table's 0.178 is rounded up past the B/C boundary (ratio 0.6995);
        // the unrounded calibrated density is B.
        let rho_b = crate::calibration::init_density(Los::B, None, &f, &Default::default()).unwrap();
        assert_eq!(los_classify(&f, rho_b - 1e-9), Los::B);
        assert_eq!(los_classify(&f, 0.177), Los::B);
        assert_eq!(los_classify(&f, 1.0), Los::E);
        let front = NormalizedFlux::new(20.0, 500.0, 200.0, 1.0).unwrap();
        assert_eq!(los_classify(&front, 0.245), Los::C);
        assert_eq!(los_classify(&front, 0.29), Los::D);
        assert_eq!(los_classify(&front, 0.31), Los::E);
    }
}
