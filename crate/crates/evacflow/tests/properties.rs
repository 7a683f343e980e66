use proptest::prelude::*;

use evacflow::calibration::{init_density, LosAlphaTable};
use evacflow::engine::{EngineConfig, Simulation, SECONDS_PER_HOUR};
use evacflow::flux::{riemann_flux, Branch, NormalizedFlux};
use evacflow::junction::{resolve, JunctionProblem, Regime};
use evacflow::network::full_entries;
use evacflow::optimizer::{boundary_excess, sbcd, SbcdConfig};
use evacflow::toy::{self, Experiment, ToyParams};
use evacflow::verify::{accepted_losses_decrease, ring_network, Surrogate};
use evacflow::Los;

fn flux() -> impl Strategy<Value = NormalizedFlux> {
    (10.0..70.0f64, 200.0..2000.0f64, 1.0..4.0f64).prop_filter_map("sigma below 1", |(v, fc, n)| NormalizedFlux::new(v, fc, 200.0, n).ok())
}

/// Column-stochastic `m × n` matrix.
fn stochastic(m: usize, n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0.01..1.0f64, m), n).prop_map(move |cols| {
        let mut a = vec![vec![0.0; n]; m];
        for (i, col) in cols.iter().enumerate() {
            let s: f64 = col.iter().sum();
            for j in 0..m {
                a[j][i] = col[j] / s;
            }
        }
        a
    })
}

fn junction() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<Vec<f64>>)> {
    (1..4usize, 1..4usize).prop_flat_map(|(n, m)| {
        (prop::collection::vec(0.0..10.0f64, n), prop::collection::vec(0.0..10.0f64, m), stochastic(m, n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flux_is_concave(f in flux(), a in 0.0..1.0f64, b in 0.0..1.0f64, t in 0.0..1.0f64) {
        let n = f.lanes();
        let (lo, hi) = if a < b { (a * n, b * n) } else { (b * n, a * n) };
        let mid = lo + t * (hi - lo);
        let chord = f.value(lo) + t * (f.value(hi) - f.value(lo));
        prop_assert!(f.value(mid) >= chord - 1e-12);
    }

    #[test]
    fn lane_scaling(f in flux(), n in 1.0..5.0f64) {
        let one = f.with_lanes(1.0).unwrap();
        let many = f.with_lanes(n).unwrap();
        for k in 0..=1000 {
            let rho = n * k as f64 / 1000.0;
            prop_assert!((many.value(rho) - n * one.value(rho / n)).abs() <= 1e-12 * n.max(1.0) * one.capacity().max(1.0));
        }
    }

    #[test]
    fn max_wave_speed_bounds_the_derivative(f in flux()) {
        let n = f.lanes();
        let numeric = (0..=20_000).map(|k| f.derivative(n * k as f64 / 20_000.0).abs()).fold(0.0, f64::max);
        prop_assert!((numeric - f.max_wave_speed()).abs() <= 1e-9 * f.max_wave_speed());
    }

    #[test]
    fn inverse_and_tau_round_trip(f in flux(), u in 0.0..1.0f64, r in 0.0..1.0f64) {
        let g = u * f.capacity();
        for b in [Branch::Free, Branch::Congested] {
            prop_assert!((f.eval(f.inverse(g, b).unwrap()).unwrap() - g).abs() <= 1e-10 * f.capacity().max(1.0));
        }
        let rho = r * f.lanes();
        prop_assert!((f.value(f.tau(rho).unwrap()) - f.value(rho)).abs() <= 1e-10 * f.capacity().max(1.0));
    }

    #[test]
    fn riemann_flux_within_endpoint_range(f in flux(), a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let (l, r) = (a * f.lanes(), b * f.lanes());
        let g = riemann_flux(&f, l, r);
        prop_assert!(g >= -1e-12 && g <= f.capacity() + 1e-12);
        // Only a transonic rarefaction can carry more than both end fluxes.
        let transonic = if l > f.critical() && r < f.critical() { f.capacity() } else { 0.0 };
        let bound = f.value(l).max(f.value(r)).max(transonic);
        prop_assert!(g <= bound + 1e-12);
    }

    #[test]
    fn junction_kirchhoff_box_and_preferences((c_in, c_out, a) in junction()) {
        let sol = resolve(&JunctionProblem { c_in: &c_in, c_out: &c_out, a: &a });
        let s_in: f64 = sol.gamma_in.iter().sum();
        let s_out: f64 = sol.gamma_out.iter().sum();
        prop_assert!((s_in - s_out).abs() <= 1e-10 * s_in.max(1.0));
        for (g, c) in sol.gamma_in.iter().zip(&c_in).chain(sol.gamma_out.iter().zip(&c_out)) {
            prop_assert!(*g >= 0.0 && *g <= c + 1e-12);
        }
        if sol.regime == Regime::Preferences {
            for (j, row) in a.iter().enumerate() {
                let want: f64 = row.iter().zip(&sol.gamma_in).map(|(x, g)| x * g).sum();
                prop_assert!((sol.gamma_out[j] - want).abs() <= 1e-10 * s_in.max(1.0));
            }
        }
    }

    #[test]
    fn junction_throughput_monotone_in_capacity((c_in, c_out, a) in junction(), k in 0..6usize, bump in 0.0..5.0f64) {
        let base: f64 = resolve(&JunctionProblem { c_in: &c_in, c_out: &c_out, a: &a }).gamma_in.iter().sum();
        let (mut ci, mut co) = (c_in.clone(), c_out.clone());
        if k < ci.len() { ci[k] += bump } else { let i = k % co.len(); co[i] += bump }
        let more: f64 = resolve(&JunctionProblem { c_in: &ci, c_out: &co, a: &a }).gamma_in.iter().sum();
        prop_assert!(more >= base - 1e-12);
    }

    #[test]
    fn exit_lane_kink(n5 in 0.2..4.0f64) {
        let fc1 = 5.0;
        let c_in = [4.0, 5.0];
        let c_out = [n5 * fc1];
        let a = vec![vec![1.0, 1.0]];
        let out: f64 = resolve(&JunctionProblem { c_in: &c_in, c_out: &c_out, a: &a }).gamma_out.iter().sum();
        prop_assert!((out - (c_in[0] + c_in[1]).min(n5 * fc1)).abs() <= 1e-12);
    }

    #[test]
    fn init_density_meets_its_defining_relation(f in flux(), alpha in 0.05..0.95f64) {
        let one = f.with_lanes(1.0).unwrap();
        let t = LosAlphaTable { a: 1.0, b: alpha, c: alpha * 0.9, d: alpha * 0.8, e: alpha * 0.7 };
        let rho = init_density(Los::B, None, &one, &t).unwrap();
        prop_assert!(rho > one.sigma_norm() && rho < 1.0);
        prop_assert!((one.value(rho) - alpha * one.v_f() * rho).abs() <= 1e-8);
    }

    #[test]
    fn preferences_round_trip(vals in prop::collection::vec(0.01..0.99f64, 15)) {
        let net = evacflow::Network::build(
            &evacflow::NetworkConfig::load(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/lahaina/am_base.json")).unwrap(),
            &evacflow::BuildOptions { rho_jam: 200.0, dx_target_mi: 0.05 },
        ).unwrap();
        let layout = net.preference_layout();
        let v: Vec<f64> = vals.iter().cycle().take(layout.len).cloned().collect();
        let mut n2 = net.clone();
        n2.apply_preferences(&layout, &v).unwrap();
        prop_assert_eq!(n2.read_preferences(&layout), v.clone());
        let full = full_entries(&layout, &v);
        if boundary_excess(&full, 0.0) == 0.0 {
            for j in &n2.junctions {
                for i in 0..j.incoming.len() {
                    let s: f64 = j.alpha.iter().map(|row| row[i]).sum();
                    prop_assert!((s - 1.0).abs() <= 1e-9);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn ring_conserves_mass(bump in 0.0..1.0f64, cfl in 0.2..1.0f64) {
        let mut net = ring_network(0.02).unwrap();
        for v in net.road_mut("b").unwrap().rho.iter_mut().step_by(3) {
            *v = bump;
        }
        let m0 = net.total_mass();
        let mut sim = Simulation::new(net, EngineConfig { cfl_nu: cfl }).unwrap();
        for _ in 0..2000 {
            let dt = sim.dt;
            sim.step_once(dt).unwrap();
        }
        prop_assert!((sim.network.total_mass() / m0 - 1.0).abs() < 1e-8);
        for r in &sim.network.roads {
            prop_assert!(r.rho.iter().all(|&x| (0.0..=r.flux.lanes()).contains(&x)));
        }
    }

    #[test]
    fn toy_global_balance(rho in 0.05..0.95f64, n5 in 1.0..3.0f64, alpha in 0.05..0.95f64, d in any::<bool>()) {
        let p = ToyParams { rho_init: rho, n5, alpha, ..Default::default() };
        let exp = if d { Experiment::D } else { Experiment::B };
        let net = toy::build_network(&p, exp, 0.02).unwrap();
        let m0 = net.total_mass() * p.rho_jam;
        let mut sim = Simulation::new(net, EngineConfig { cfl_nu: 0.5 }).unwrap();
        sim.advance(400.0 / SECONDS_PER_HOUR).unwrap();
        let m1 = sim.network.total_mass() * p.rho_jam;
        let bal = sim.metrics.cars_entered() - sim.metrics.cars_exited() - (m1 - m0);
        prop_assert!(bal.abs() <= 1e-6 * m0.max(m1).max(1.0), "imbalance {}", bal);
        for r in &sim.network.roads {
            prop_assert!(r.rho.iter().all(|&x| (0.0..=r.flux.lanes()).contains(&x)));
        }
    }

    #[test]
    fn metrics_are_additive(k in 1u64..400) {
        let p = ToyParams::default();
        let net = toy::build_network(&p, Experiment::D, 0.02).unwrap();
        let sim0 = Simulation::new(net, EngineConfig { cfl_nu: 0.5 }).unwrap();
        let t1 = k as f64 * sim0.dt;
        let t2 = 500.0 * sim0.dt;
        let mut whole = sim0.clone();
        whole.advance(t2).unwrap();
        let mut split = sim0;
        split.advance(t1).unwrap();
        let w1 = split.metrics.weighted_time_integrated();
        split.advance(t2 - t1).unwrap();
        let parts = w1 + (split.metrics.weighted_time_integrated() - w1);
        prop_assert!((parts - whole.metrics.weighted_time_integrated()).abs() <= 1e-10 * parts.abs().max(1.0));
        prop_assert!((split.metrics.cars_exited() - whole.metrics.cars_exited()).abs() <= 1e-10 * whole.metrics.cars_exited().max(1.0));
        prop_assert!(w1 <= whole.metrics.weighted_time_integrated() + 1e-12);
    }

    #[test]
    fn penalty_keeps_iterates_near_the_box(c0 in -0.5..0.0f64, c1 in 1.0..1.5f64, seed in 0u64..1000) {
        let s = Surrogate { center: vec![c0, c1, 0.5] };
        let cfg = SbcdConfig { rng_seed: seed, s: 2, ..Default::default() };
        let r = sbcd(&s, &[0.5, 0.5, 0.5], &cfg).unwrap();
        prop_assert!(boundary_excess(&r.alpha, cfg.eps_tol) < 0.01);
        prop_assert!(accepted_losses_decrease(&r.trace));
        let again = sbcd(&s, &[0.5, 0.5, 0.5], &cfg).unwrap();
        prop_assert_eq!(r.alpha, again.alpha);
    }
}

#[test]
fn weights_halve_toward_the_exit() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/lahaina/");
    let mut nets = vec![toy::build_network(&ToyParams::default(), Experiment::D, 0.05).unwrap()];
    for f in ["am_base.json", "pm5.json"] {
        let cfg = evacflow::NetworkConfig::load(format!("{dir}{f}")).unwrap();
        nets.push(evacflow::Network::build(&cfg, &evacflow::BuildOptions { rho_jam: 200.0, dx_target_mi: 0.05 }).unwrap());
    }
    for net in &nets {
        for j in &net.junctions {
            let best = j.outgoing.iter().map(|&o| net.roads[o].weight).fold(0.0, f64::max);
            for &i in &j.incoming {
                assert_eq!(net.roads[i].weight * 2.0, best, "{}", net.roads[i].id);
            }
        }
    }
}
