//! Throughput-maximizing junction fluxes.
//!
//! Given incoming capacities `c_in`, outgoing capacities `c_out` and a
//! column-stochastic distribution matrix `A` (rows outgoing, columns incoming),
//! the fluxes are chosen in one of three regimes depending on
//! `r = max_j (A_j · c_in) / c_out_j`.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `r ≤ 1`: every incoming road sends its full capacity and drivers'
    /// preferences are honoured.
    Preferences,
    /// `r > 1` with total demand fitting downstream: outgoing fluxes are the
    /// outgoing capacities scaled down.
    OutScaled,
    /// Total demand exceeds total supply: incoming fluxes are scaled down.
    InScaled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JunctionProblem<'a> {
    pub c_in: &'a [f64],
    pub c_out: &'a [f64],
    /// `a[j][i]`: share of incoming road `i` heading to outgoing road `j`.
    pub a: &'a [Vec<f64>],
}

#[derive(Debug, Clone, PartialEq)]
pub struct JunctionSolution {
    pub gamma_in: Vec<f64>,
    pub gamma_out: Vec<f64>,
    pub regime: Regime,
    /// Scale applied to the outgoing capacities.
    pub lambda: f64,
    /// Scale applied to the incoming capacities.
    pub mu: f64,
}

/// Per-row ratios `r_j` and their maximum. A zero-capacity row with positive
/// demand gives `+∞`; with zero demand it gives 0.
pub fn capacity_ratio(p: &JunctionProblem) -> (f64, Vec<f64>) {
    let rows: Vec<f64> = p
        .a
        .iter()
        .zip(p.c_out)
        .map(|(row, &c)| {
            let load: f64 = row.iter().zip(p.c_in).map(|(a, c)| a * c).sum();
            if c > 0.0 {
                load / c
            } else if load > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .collect();
    let r = rows.iter().cloned().fold(0.0, f64::max);
    (r, rows)
}

pub fn resolve(p: &JunctionProblem) -> JunctionSolution {
    let mut gamma_in = Vec::with_capacity(p.c_in.len());
    let mut gamma_out = Vec::with_capacity(p.c_out.len());
    resolve_into(p, &mut gamma_in, &mut gamma_out);
    let (regime, lambda, mu) = classify(p);
    JunctionSolution { gamma_in, gamma_out, regime, lambda, mu }
}

fn classify(p: &JunctionProblem) -> (Regime, f64, f64) {
    let (r, _) = capacity_ratio(p);
    let s_in: f64 = p.c_in.iter().sum();
    let s_out: f64 = p.c_out.iter().sum();
    if s_out <= 0.0 {
        (Regime::InScaled, 1.0, 0.0)
    } else if r <= 1.0 {
        (Regime::Preferences, 1.0, 1.0)
    } else if s_in <= s_out {
        (Regime::OutScaled, s_in / s_out, 1.0)
    } else {
        (Regime::InScaled, 1.0, s_out / s_in)
    }
}

/// Allocation-light variant used by the engine; fills the two buffers and
/// returns the regime.
pub fn resolve_into(p: &JunctionProblem, gamma_in: &mut Vec<f64>, gamma_out: &mut Vec<f64>) -> Regime {
    gamma_in.clear();
    gamma_out.clear();
    let s_in: f64 = p.c_in.iter().sum();
    let s_out: f64 = p.c_out.iter().sum();
    if s_out <= 0.0 {
        gamma_in.extend(p.c_in.iter().map(|_| 0.0));
        gamma_out.extend(p.c_out.iter().map(|_| 0.0));
        return Regime::InScaled;
    }
    let (r, _) = capacity_ratio(p);
    if r <= 1.0 {
        gamma_in.extend_from_slice(p.c_in);
        gamma_out.extend(p.a.iter().map(|row| row.iter().zip(p.c_in).map(|(a, c)| a * c).sum::<f64>()));
        // Row sums of A·c_in equal Σc_in only up to rounding.
        rebalance(gamma_out, s_in, p.c_out);
        Regime::Preferences
    } else if s_in <= s_out {
        gamma_in.extend_from_slice(p.c_in);
        let k = s_in / s_out;
        gamma_out.extend(p.c_out.iter().map(|c| k * c));
        Regime::OutScaled
    } else {
        let k = s_out / s_in;
        gamma_in.extend(p.c_in.iter().map(|c| k * c));
        gamma_out.extend_from_slice(p.c_out);
        Regime::InScaled
    }
}

fn rebalance(out: &mut [f64], target: f64, caps: &[f64]) {
    let s: f64 = out.iter().sum();
    let err = target - s;
    if err == 0.0 || out.is_empty() {
        return;
    }
    let j = (0..out.len())
        .max_by(|&a, &b| (caps[a] - out[a]).total_cmp(&(caps[b] - out[b])))
        .unwrap();
    out[j] = (out[j] + err).clamp(0.0, caps[j].max(out[j]));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn congested_toy_right_junction() {
        let a = vec![vec![1.0, 1.0]];
        let p = JunctionProblem { c_in: &[4.0, 5.0], c_out: &[5.0], a: &a };
        let (r, _) = capacity_ratio(&p);
        assert!((r - 1.8).abs() < 1e-12);
        let s = resolve(&p);
        assert_eq!(s.regime, Regime::InScaled);
        assert_eq!(s.gamma_out, vec![5.0]);
        assert!((s.gamma_in[0] - 4.0 * 5.0 / 9.0).abs() < 1e-12);
        assert!((s.gamma_in[1] - 5.0 * 5.0 / 9.0).abs() < 1e-12);

        let p = JunctionProblem { c_in: &[4.0, 5.0], c_out: &[10.0], a: &a };
        let s = resolve(&p);
        assert_eq!(s.regime, Regime::Preferences);
        assert!((s.gamma_out[0] - 9.0).abs() < 1e-12);
    }

    #[test]
    fn zero_and_balanced() {
        let a = vec![vec![0.5], vec![0.5]];
        let p = JunctionProblem { c_in: &[0.0], c_out: &[1.0, 1.0], a: &a };
        assert_eq!(capacity_ratio(&p).0, 0.0);
        let s = resolve(&p);
        assert_eq!(s.regime, Regime::Preferences);
        assert!(s.gamma_in.iter().chain(&s.gamma_out).all(|&g| g == 0.0));

        let p = JunctionProblem { c_in: &[2.0], c_out: &[1.0, 1.0], a: &a };
        assert_eq!(capacity_ratio(&p).0, 1.0);
        assert_eq!(resolve(&p).regime, Regime::Preferences);
    }

    #[test]
    fn closed_road_is_infinite_ratio() {
        let a = vec![vec![0.5], vec![0.5]];
        let p = JunctionProblem { c_in: &[2.0], c_out: &[0.0, 3.0], a: &a };
        let (r, rows) = capacity_ratio(&p);
        assert!(r.is_infinite() && rows[1] < 1.0);
        let s = resolve(&p);
        assert_eq!(s.regime, Regime::OutScaled);
        assert_eq!(s.gamma_out[0], 0.0);
        assert!((s.gamma_out[1] - 2.0).abs() < 1e-12);

        let p = JunctionProblem { c_in: &[2.0], c_out: &[0.0, 0.0], a: &a };
        let s = resolve(&p);
        assert_eq!(s.regime, Regime::InScaled);
        assert_eq!(s.gamma_in, vec![0.0]);
    }

    #[test]
    fn out_scaled_regime() {
        // One row overloads while totals still fit.
        let a = vec![vec![0.9, 0.9], vec![0.1, 0.1]];
        let p = JunctionProblem { c_in: &[1.0, 1.0], c_out: &[1.0, 3.0], a: &a };
        let s = resolve(&p);
        assert_eq!(s.regime, Regime::OutScaled);
        assert_eq!(s.gamma_in, vec![1.0, 1.0]);
        assert!((s.gamma_out[0] - 0.5).abs() < 1e-12);
        assert!((s.gamma_out[1] - 1.5).abs() < 1e-12);
    }
}
