//! Runs every acceptance criterion and prints one PASS/FAIL line each.
//! Failures are reported, not fatal, unless `EVACFLOW_STRICT` is set; the
//! `evacflow verify` command always exits nonzero on a failure.

use std::time::Instant;

use evacflow::verify;

fn main() {
    let data = verify::default_data_dir();
    let checks: Vec<(&str, Box<dyn Fn() -> verify::CriterionResult>)> = vec![
        ("1", Box::new(verify::phase_transition)),
        ("2", Box::new(verify::table2)),
        ("3", Box::new(verify::oracle_equivalence)),
        ("4", Box::new(|| verify::junction_brute_force(10_000, 0))),
        ("5", Box::new(verify::ring_conservation)),
        ("6", Box::new({
            let d = data.clone();
            move || verify::calibration_tables(&d)
        })),
        ("7", Box::new(verify::optimizer)),
        ("8", Box::new({
            let d = data.clone();
            move || verify::lahaina(&d)
        })),
        ("9", Box::new({
            let d = data.clone();
            move || verify::determinism(&d)
        })),
    ];
    let mut failed = 0;
    for (_, check) in &checks {
        let t0 = Instant::now();
        let r = check();
        println!("{r} ({:.1} s)", t0.elapsed().as_secs_f64());
        failed += usize::from(!r.pass);
    }
    println!("{} of {} criteria passed", checks.len() - failed, checks.len());
    if failed > 0 && std::env::var_os("EVACFLOW_STRICT").is_some() {
        std::process::exit(1);
    }
}
