//! Directed road graph: configuration schema, validation, exit-distance
//! weights and the flat preference-parameter layout.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use petgraph::algo::dijkstra;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::NormalizedFlux;
use crate::junction::Regime;

/// Which side of town a source road drains. Eastern sources take `γ₂` in
/// scenario runs, everything else `γ₁`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    #[default]
    West,
    East,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum BoundaryConfig {
    Nonreflecting,
    Prescribed {
        /// Per-lane normalized density. Source roads may leave it out; the
        /// scenario's γ fills it in.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        density: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EndConfig {
    Junction(String),
    Boundary(BoundaryConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoadConfig {
    pub id: String,
    pub length_mi: f64,
    pub lanes: f64,
    pub v_f_mph: f64,
    pub f_c_vphpl: f64,
    pub left: EndConfig,
    pub right: EndConfig,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub source: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub exit: bool,
    /// Per-lane normalized initial density.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_density: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
    /// Drawing endpoints for heatmap SVGs, `[[x0, y0], [x1, y1]]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<[[f64; 2]; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JunctionConfig {
    pub id: String,
    #[serde(rename = "in")]
    pub incoming: Vec<String>,
    #[serde(rename = "out")]
    pub outgoing: Vec<String>,
    /// `m × n` distribution matrix, rows outgoing. Uniform when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub roads: Vec<RoadConfig>,
    #[serde(default)]
    pub junctions: Vec<JunctionConfig>,
}

impl NetworkConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json { path: path.into(), source })
    }

    pub fn road(&self, id: &str) -> Option<&RoadConfig> {
        self.roads.iter().find(|r| r.id == id)
    }

    pub fn road_mut(&mut self, id: &str) -> Option<&mut RoadConfig> {
        self.roads.iter_mut().find(|r| r.id == id)
    }

    /// Structural checks. Every problem is reported with the offending id.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let mut road_ids = HashSet::new();
        for r in &self.roads {
            if !road_ids.insert(r.id.as_str()) {
                errs.push(format!("duplicate road id {}", r.id));
            }
        }
        let mut junctions: HashMap<&str, &JunctionConfig> = HashMap::new();
        for j in &self.junctions {
            if junctions.insert(j.id.as_str(), j).is_some() {
                errs.push(format!("duplicate junction id {}", j.id));
            }
        }
        if self.roads.is_empty() {
            errs.push("network has no roads".into());
        }

        for r in &self.roads {
            if !(r.length_mi > 0.0) {
                errs.push(format!("road {}: length must be positive", r.id));
            }
            if !(r.v_f_mph > 0.0 && r.f_c_vphpl > 0.0) {
                errs.push(format!("road {}: speed and capacity must be positive", r.id));
            }
            if !(r.lanes >= 1.0) {
                errs.push(format!("road {}: lanes must be at least 1", r.id));
            }
            if let Some(d) = r.init_density {
                if !(0.0..=1.0).contains(&d) {
                    errs.push(format!("road {}: init_density {d} outside [0, 1]", r.id));
                }
            }
            for (side, end, list) in [("left", &r.left, "out"), ("right", &r.right, "in")] {
                match end {
                    EndConfig::Junction(jid) => match junctions.get(jid.as_str()) {
                        None => errs.push(format!("road {}: {side} end attached to missing junction {jid}", r.id)),
                        Some(j) => {
                            let members = if list == "out" { &j.outgoing } else { &j.incoming };
                            if !members.contains(&r.id) {
                                errs.push(format!("road {}: {side} end names junction {jid} which does not list it as {list}", r.id));
                            }
                        }
                    },
                    EndConfig::Boundary(BoundaryConfig::Prescribed { density: Some(d) }) if !(0.0..=1.0).contains(d) => {
                        errs.push(format!("road {}: {side} boundary density {d} outside [0, 1]", r.id));
                    }
                    EndConfig::Boundary(BoundaryConfig::Prescribed { density: None }) if !r.source => {
                        errs.push(format!("road {}: {side} prescribed boundary needs a density", r.id));
                    }
                    _ => {}
                }
            }
            if r.exit && !matches!(r.right, EndConfig::Boundary(_)) {
                errs.push(format!("road {}: exit road must end at a boundary", r.id));
            }
            if r.source && !matches!(r.left, EndConfig::Boundary(_)) {
                errs.push(format!("road {}: source road must start at a boundary", r.id));
            }
        }
        if !self.roads.iter().any(|r| r.exit) {
            errs.push("network has no exit road".into());
        }

        for j in &self.junctions {
            if j.incoming.is_empty() || j.outgoing.is_empty() {
                errs.push(format!("junction {}: needs at least one incoming and one outgoing road", j.id));
            }
            for (rid, want) in j.incoming.iter().map(|r| (r, "right")).chain(j.outgoing.iter().map(|r| (r, "left"))) {
                match self.road(rid) {
                    None => errs.push(format!("junction {}: unknown road {rid}", j.id)),
                    Some(r) => {
                        let end = if want == "right" { &r.right } else { &r.left };
                        if !matches!(end, EndConfig::Junction(x) if x == &j.id) {
                            errs.push(format!("junction {}: road {rid} {want} end is not attached here", j.id));
                        }
                    }
                }
            }
            if let Some(a) = &j.alpha {
                let (m, n) = (j.outgoing.len(), j.incoming.len());
                if a.len() != m || a.iter().any(|row| row.len() != n) {
                    errs.push(format!("junction {}: alpha must be {m}x{n}", j.id));
                    continue;
                }
                for i in 0..n {
                    let s: f64 = a.iter().map(|row| row[i]).sum();
                    if (s - 1.0).abs() > 1e-9 {
                        errs.push(format!("junction {}: distribution column not stochastic (column {i} sums to {s})", j.id));
                    }
                    if m > 1 && a.iter().any(|row| !(row[i] > 0.0 && row[i] < 1.0)) {
                        errs.push(format!("junction {}: column {i} has an entry outside (0, 1)", j.id));
                    }
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

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    NonReflecting,
    /// Per-lane normalized density.
    Prescribed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RoadEnd {
    /// Junction index and the road's position in that junction's
    /// outgoing (left end) or incoming (right end) list.
    Junction { junction: usize, slot: usize },
    Boundary(Boundary),
}

#[derive(Debug, Clone)]
pub struct Road {
    pub id: String,
    pub length: f64,
    pub flux: NormalizedFlux,
    pub dx: f64,
    /// Lane-scaled normalized densities, one per cell.
    pub rho: Vec<f64>,
    pub left: RoadEnd,
    pub right: RoadEnd,
    pub is_source: bool,
    pub is_exit: bool,
    pub region: Region,
    pub distance: Option<u32>,
    pub weight: f64,
    /// Ghost densities left and right of the interior cells.
    pub ghost: (f64, f64),
    pub geometry: Option<[[f64; 2]; 2]>,
}

impl Road {
    pub fn cells(&self) -> usize {
        self.rho.len()
    }

    /// Normalized vehicle count `Σ ρ dx` (multiply by ρ_jam for vehicles).
    pub fn mass(&self) -> f64 {
        self.rho.iter().sum::<f64>() * self.dx
    }

    pub fn cell_center(&self, m: usize) -> f64 {
        (m as f64 + 0.5) * self.dx
    }
}

#[derive(Debug, Clone)]
pub struct Junction {
    pub id: String,
    pub incoming: Vec<usize>,
    pub outgoing: Vec<usize>,
    /// `alpha[j][i]`, rows outgoing.
    pub alpha: Vec<Vec<f64>>,
    pub gamma_in: Vec<f64>,
    pub gamma_out: Vec<f64>,
    pub regime: Regime,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    pub rho_jam: f64,
    pub dx_target_mi: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { rho_jam: crate::flux::RHO_JAM_DEFAULT, dx_target_mi: 0.01 }
    }
}

/// One slot group of the flat preference vector: the column of `A` for
/// incoming road `incoming` at junction `junction`, holding `m − 1` free
/// entries starting at `offset`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrefSlot {
    pub junction: usize,
    pub incoming: usize,
    pub offset: usize,
    pub free: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct PreferenceLayout {
    pub slots: Vec<PrefSlot>,
    pub len: usize,
}

#[derive(Debug, Clone)]
pub struct Network {
    pub name: String,
    pub roads: Vec<Road>,
    pub junctions: Vec<Junction>,
    pub rho_jam: f64,
    road_index: HashMap<String, usize>,
}

impl Network {
    pub fn build(cfg: &NetworkConfig, opts: &BuildOptions) -> Result<Self> {
        cfg.validate()?;
        if !(opts.dx_target_mi > 0.0) {
            return Err(Error::InvalidParameter(format!("dx target must be positive, got {}", opts.dx_target_mi)));
        }
        let road_index: HashMap<String, usize> = cfg.roads.iter().enumerate().map(|(i, r)| (r.id.clone(), i)).collect();
        let junction_index: HashMap<&str, usize> = cfg.junctions.iter().enumerate().map(|(i, j)| (j.id.as_str(), i)).collect();

        let mut junctions = Vec::with_capacity(cfg.junctions.len());
        for j in &cfg.junctions {
            let (m, n) = (j.outgoing.len(), j.incoming.len());
            let alpha = j.alpha.clone().unwrap_or_else(|| vec![vec![1.0 / m as f64; n]; m]);
            junctions.push(Junction {
                id: j.id.clone(),
                incoming: j.incoming.iter().map(|r| road_index[r]).collect(),
                outgoing: j.outgoing.iter().map(|r| road_index[r]).collect(),
                alpha,
                gamma_in: vec![0.0; n],
                gamma_out: vec![0.0; m],
                regime: Regime::Preferences,
            });
        }

        let end = |e: &EndConfig, rid: &str, outgoing: bool| -> RoadEnd {
            match e {
                EndConfig::Junction(jid) => {
                    let ji = junction_index[jid.as_str()];
                    let list = if outgoing { &cfg.junctions[ji].outgoing } else { &cfg.junctions[ji].incoming };
                    RoadEnd::Junction { junction: ji, slot: list.iter().position(|r| r == rid).unwrap() }
                }
                EndConfig::Boundary(BoundaryConfig::Nonreflecting) => RoadEnd::Boundary(Boundary::NonReflecting),
                EndConfig::Boundary(BoundaryConfig::Prescribed { density }) => {
                    RoadEnd::Boundary(Boundary::Prescribed(density.unwrap_or(0.0)))
                }
            }
        };

        let mut roads = Vec::with_capacity(cfg.roads.len());
        for r in &cfg.roads {
            let flux = NormalizedFlux::new(r.v_f_mph, r.f_c_vphpl, opts.rho_jam, r.lanes)
                .map_err(|e| Error::Validation(vec![format!("road {}: {e}", r.id)]))?;
            let cells = ((r.length_mi / opts.dx_target_mi).round() as usize).max(3);
            let rho0 = r.init_density.unwrap_or(0.0) * r.lanes;
            roads.push(Road {
                id: r.id.clone(),
                length: r.length_mi,
                flux,
                dx: r.length_mi / cells as f64,
                rho: vec![rho0; cells],
                left: end(&r.left, &r.id, true),
                right: end(&r.right, &r.id, false),
                is_source: r.source,
                is_exit: r.exit,
                region: r.region.unwrap_or_default(),
                distance: None,
                weight: 0.0,
                ghost: (rho0, rho0),
                geometry: r.geometry,
            });
        }

        let mut net = Network {
            name: cfg.name.clone().unwrap_or_default(),
            roads,
            junctions,
            rho_jam: opts.rho_jam,
            road_index,
        };
        net.assign_weights()?;
        net.check_span_condition();
        Ok(net)
    }

    pub fn road_index(&self, id: &str) -> Option<usize> {
        self.road_index.get(id).copied()
    }

    pub fn road(&self, id: &str) -> Option<&Road> {
        self.road_index(id).map(|i| &self.roads[i])
    }

    pub fn road_mut(&mut self, id: &str) -> Option<&mut Road> {
        self.road_index(id).map(move |i| &mut self.roads[i])
    }

    /// Total normalized vehicle count `Σ_i Σ_m ρ dx`.
    pub fn total_mass(&self) -> f64 {
        self.roads.iter().map(Road::mass).sum()
    }

    /// Exit distances by Dijkstra over junctions, walking roads backwards
    /// from the exits. Exit roads get `d = 0`, the junction an exit road
    /// leaves gets distance 1, and every other road inherits the distance of
    /// the junction it flows into. Roads with no route to an exit get `w = 0`.
    pub fn assign_weights(&mut self) -> Result<()> {
        if !self.roads.iter().any(|r| r.is_exit) {
            return Err(Error::Validation(vec!["network has no exit road".into()]));
        }
        let mut g: DiGraph<(), u32> = DiGraph::new();
        let nodes: Vec<NodeIndex> = self.junctions.iter().map(|_| g.add_node(())).collect();
        let root = g.add_node(());
        for r in &self.roads {
            match (r.left, r.right) {
                (RoadEnd::Junction { junction: a, .. }, RoadEnd::Junction { junction: b, .. }) => {
                    g.add_edge(nodes[b], nodes[a], 1);
                }
                (RoadEnd::Junction { junction: a, .. }, RoadEnd::Boundary(_)) if r.is_exit => {
                    g.add_edge(root, nodes[a], 1);
                }
                _ => {}
            }
        }
        let dist = dijkstra(&g, root, None, |e| *e.weight());
        for r in &mut self.roads {
            r.distance = if r.is_exit {
                Some(0)
            } else if let RoadEnd::Junction { junction, .. } = r.right {
                dist.get(&nodes[junction]).copied()
            } else {
                None
            };
            match r.distance {
                Some(d) => r.weight = 0.5f64.powi(d as i32),
                None => {
                    r.weight = 0.0;
                    log::warn!("road {} has no route to an exit; weight set to 0", r.id);
                }
            }
        }
        Ok(())
    }

    /// Warns when `(1, …, 1)` lies in the span of some `n − 1` vectors drawn
    /// from the rows of `A` and the standard basis (junctions with at least
    /// two incoming and two outgoing roads only).
    pub fn check_span_condition(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        for j in &self.junctions {
            let (n, m) = (j.incoming.len(), j.outgoing.len());
            if n < 2 || m < 2 {
                continue;
            }
            if span_condition_violated(&j.alpha, n) {
                let w = format!("junction {}: (1,...,1) lies in the span of n-1 rows of A / basis vectors", j.id);
                log::warn!("{w}");
                warnings.push(w);
            }
        }
        warnings
    }

    pub fn preference_layout(&self) -> PreferenceLayout {
        let mut slots = Vec::new();
        let mut offset = 0;
        for (ji, j) in self.junctions.iter().enumerate() {
            let m = j.outgoing.len();
            if m < 2 {
                continue;
            }
            for i in 0..j.incoming.len() {
                slots.push(PrefSlot { junction: ji, incoming: i, offset, free: m - 1 });
                offset += m - 1;
            }
        }
        PreferenceLayout { slots, len: offset }
    }

    /// Fills each column from its `m − 1` free entries; the last entry is
    /// `1 − Σ` and is not clamped.
    pub fn apply_preferences(&mut self, layout: &PreferenceLayout, values: &[f64]) -> Result<()> {
        if values.len() != layout.len {
            return Err(Error::InvalidParameter(format!(
                "preference vector has {} entries, layout expects {}",
                values.len(),
                layout.len
            )));
        }
        for s in &layout.slots {
            let j = self
                .junctions
                .get_mut(s.junction)
                .filter(|j| j.outgoing.len() == s.free + 1 && s.incoming < j.incoming.len())
                .ok_or_else(|| Error::InvalidParameter("preference layout does not match network".into()))?;
            let col = &values[s.offset..s.offset + s.free];
            let mut rest = 1.0;
            for (k, v) in col.iter().enumerate() {
                j.alpha[k][s.incoming] = *v;
                rest -= v;
            }
            j.alpha[s.free][s.incoming] = rest;
        }
        Ok(())
    }

    pub fn read_preferences(&self, layout: &PreferenceLayout) -> Vec<f64> {
        let mut v = vec![0.0; layout.len];
        for s in &layout.slots {
            let j = &self.junctions[s.junction];
            for k in 0..s.free {
                v[s.offset + k] = j.alpha[k][s.incoming];
            }
        }
        v
    }

    /// Roads flagged as sources.
    pub fn sources(&self) -> impl Iterator<Item = usize> + '_ {
        self.roads.iter().enumerate().filter(|(_, r)| r.is_source).map(|(i, _)| i)
    }

    /// Sets the prescribed left-boundary density of every source road.
    pub fn set_source_densities(&mut self, west: f64, east: f64) {
        for r in self.roads.iter_mut().filter(|r| r.is_source) {
            let g = match r.region {
                Region::West => west,
                Region::East => east,
            };
            r.left = RoadEnd::Boundary(Boundary::Prescribed(g));
        }
    }

    pub fn density_map(&self) -> HashMap<String, Vec<f64>> {
        self.roads.iter().map(|r| (r.id.clone(), r.rho.clone())).collect()
    }
}

/// Full columns including implied last entries, flattened in layout order.
pub fn full_entries(layout: &PreferenceLayout, values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len() + layout.slots.len());
    for s in &layout.slots {
        let col = &values[s.offset..s.offset + s.free];
        out.extend_from_slice(col);
        out.push(1.0 - col.iter().sum::<f64>());
    }
    out
}

fn span_condition_violated(alpha: &[Vec<f64>], n: usize) -> bool {
    let mut pool: Vec<Vec<f64>> = alpha.to_vec();
    for k in 0..n {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        pool.push(e);
    }
    let ones = vec![1.0; n];
    let mut picked = Vec::with_capacity(n - 1);
    combos(&pool, n - 1, 0, &mut picked, &mut |rows| {
        let r0 = rank(rows);
        let mut with = rows.to_vec();
        with.push(ones.clone());
        rank(&with) == r0
    })
}

fn combos(pool: &[Vec<f64>], k: usize, start: usize, picked: &mut Vec<Vec<f64>>, hit: &mut dyn FnMut(&[Vec<f64>]) -> bool) -> bool {
    if picked.len() == k {
        return hit(picked);
    }
    for i in start..pool.len() {
        picked.push(pool[i].clone());
        let found = combos(pool, k, i + 1, picked, hit);
        picked.pop();
        if found {
            return true;
        }
    }
    false
}

fn rank(rows: &[Vec<f64>]) -> usize {
    let mut a = rows.to_vec();
    let cols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())) else { break };
        if a[p][c].abs() < 1e-12 {
            continue;
        }
        a.swap(r, p);
        for i in 0..a.len() {
            if i != r {
                let k = a[i][c] / a[r][c];
                for cc in c..cols {
                    a[i][cc] -= k * a[r][cc];
                }
            }
        }
        r += 1;
        if r == a.len() {
            break;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn road(id: &str, left: EndConfig, right: EndConfig) -> RoadConfig {
        RoadConfig {
            id: id.into(),
            length_mi: 0.5,
            lanes: 1.0,
            v_f_mph: 25.0,
            f_c_vphpl: 500.0,
            left,
            right,
            source: false,
            exit: false,
            init_density: None,
            region: None,
            geometry: None,
        }
    }

    fn nr() -> EndConfig {
        EndConfig::Boundary(BoundaryConfig::Nonreflecting)
    }

    fn j(id: &str) -> EndConfig {
        EndConfig::Junction(id.into())
    }

    fn fork() -> NetworkConfig {
        let mut exit_a = road("a", j("J"), nr());
        exit_a.exit = true;
        NetworkConfig {
            name: None,
            roads: vec![road("in", nr(), j("J")), exit_a, road("b", j("J"), nr())],
            junctions: vec![JunctionConfig {
                id: "J".into(),
                incoming: vec!["in".into()],
                outgoing: vec!["a".into(), "b".into()],
                alpha: Some(vec![vec![0.5], vec![0.5]]),
            }],
        }
    }

    #[test]
    fn validation_reports_ids() {
        assert!(fork().validate().is_ok());

        let mut bad = fork();
        bad.junctions[0].alpha = Some(vec![vec![0.5], vec![0.4]]);
        let msg = bad.validate().unwrap_err().to_string();
        assert!(msg.contains("distribution column not stochastic"), "{msg}");

        let mut bad = fork();
        bad.roads[0].right = j("nowhere");
        let msg = bad.validate().unwrap_err().to_string();
        assert!(msg.contains("missing junction nowhere"), "{msg}");

        let mut bad = fork();
        bad.roads[1].exit = false;
        assert!(bad.validate().unwrap_err().to_string().contains("no exit road"));
    }

    #[test]
    fn single_road_weight() {
        let mut r = road("only", nr(), nr());
        r.exit = true;
        let cfg = NetworkConfig { name: None, roads: vec![r], junctions: vec![] };
        let net = Network::build(&cfg, &BuildOptions::default()).unwrap();
        assert_eq!(net.roads[0].distance, Some(0));
        assert_eq!(net.roads[0].weight, 1.0);
    }

    #[test]
    fn unreachable_road_gets_zero_weight() {
        let net = Network::build(&fork(), &BuildOptions::default()).unwrap();
        assert_eq!(net.road("a").unwrap().weight, 1.0);
        assert_eq!(net.road("in").unwrap().weight, 0.5);
        assert_eq!(net.road("b").unwrap().weight, 0.0);
        assert_eq!(net.road("b").unwrap().distance, None);
    }

    #[test]
    fn preferences_round_trip() {
        let mut net = Network::build(&fork(), &BuildOptions::default()).unwrap();
        let layout = net.preference_layout();
        assert_eq!(layout.len, 1);
        net.apply_preferences(&layout, &[0.3]).unwrap();
        assert_eq!(net.junctions[0].alpha[0][0], 0.3);
        assert!((net.junctions[0].alpha[1][0] - 0.7).abs() < 1e-15);
        assert_eq!(net.read_preferences(&layout), vec![0.3]);
        assert_eq!(full_entries(&layout, &[0.3]), vec![0.3, 0.7]);
        assert!(net.apply_preferences(&layout, &[0.3, 0.1]).is_err());
    }

    #[test]
    fn grid_sizes() {
        let mut cfg = fork();
        cfg.roads[0].length_mi = 0.01;
        let net = Network::build(&cfg, &BuildOptions { rho_jam: 200.0, dx_target_mi: 0.02 }).unwrap();
        assert_eq!(net.roads[0].cells(), 3);
        assert_eq!(net.roads[1].cells(), 25);
        assert!((net.roads[1].dx * 25.0 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn span_condition() {
        assert!(span_condition_violated(&[vec![0.5, 0.5], vec![0.5, 0.5]], 2));
        assert!(!span_condition_violated(&[vec![0.3, 0.6], vec![0.7, 0.4]], 2));
    }
}
