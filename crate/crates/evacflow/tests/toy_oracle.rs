//! Engine against the closed forms on the five-road network.

use evacflow::engine::SECONDS_PER_HOUR;
use evacflow::toy::{self, Experiment, ToyParams};
use evacflow::verify::profile_l1_error;

const T: f64 = 1000.0;

#[test]
fn cars_exited_all_experiments() {
    let free = ToyParams { rho_init: 0.1, ..Default::default() };
    let cases = [(free, Experiment::A), (ToyParams::default(), Experiment::B), (free, Experiment::C), (ToyParams::default(), Experiment::D)];
    for dx in [0.02, 0.01] {
        for (p, e) in cases {
            let exact = toy::cars_exited_closed_form(&p, e, T / SECONDS_PER_HOUR).unwrap();
            let (run, _) = toy::simulate(&p, e, T, dx, 0.5).unwrap();
            let tol = (0.05 * exact).max(2.0 * dx * p.rho_jam);
            assert!((run.cars_exited - exact).abs() <= tol, "{e:?} dx={dx}: {} vs {exact}", run.cars_exited);
        }
    }
}

#[test]
fn weighted_integrals_a_and_b() {
    for (p, e) in [(ToyParams { rho_init: 0.1, ..Default::default() }, Experiment::A), (ToyParams::default(), Experiment::B)] {
        let exact = toy::weighted_cars_closed_form(&p, e, T / SECONDS_PER_HOUR).unwrap();
        let (run, _) = toy::simulate(&p, e, T, 0.01, 0.5).unwrap();
        assert!((run.weighted_time_integrated / exact - 1.0).abs() < 0.05, "{e:?}: {} vs {exact}", run.weighted_time_integrated);
    }
}

#[test]
fn profile_error_shrinks_with_the_grid() {
    for (p, e) in [(ToyParams { rho_init: 0.1, ..Default::default() }, Experiment::A), (ToyParams::default(), Experiment::B)] {
        let errs: Vec<f64> = [0.02, 0.01, 0.005].iter().map(|&dx| profile_l1_error(&p, e, 150.0, dx).unwrap().iter().sum()).collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{e:?}: {errs:?}");
    }
}

#[test]
fn phase_transition_shape() {
    let exited: Vec<f64> = [1.0, 1.4, 1.8, 2.2, 2.6]
        .iter()
        .map(|&n5| toy::simulate(&ToyParams { n5, ..Default::default() }, Experiment::D, T, 0.02, 0.5).unwrap().0.cars_exited)
        .collect();
    assert!(exited.windows(2).all(|w| w[1] >= w[0] - 1e-9));
    assert!((exited[3] / exited[2] - 1.0).abs() < 0.01 && (exited[4] / exited[2] - 1.0).abs() < 0.01);
    assert!(exited[1] > 1.3 * exited[0]);
}
