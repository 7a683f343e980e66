use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use evacflow::scenario::{lane_reversal_experiment, run_scenario, RunOptions, ScenarioConfig, ScenarioResult};
use evacflow::toy::{self, Experiment, ToyParams};
use evacflow::{verify, Error, Result};

#[derive(Parser)]
#[command(name = "evacflow", version, about = "Macroscopic evacuation traffic simulator")]
struct Cli {
    /// Western source density for every phase.
    #[arg(long, global = true)]
    gamma1: Option<f64>,
    /// Eastern source density for every phase.
    #[arg(long, global = true)]
    gamma2: Option<f64>,
    /// CFL number.
    #[arg(long, global = true)]
    cfl: Option<f64>,
    /// Target cell length in miles.
    #[arg(long, global = true)]
    dx: Option<f64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario with fixed preferences.
    Simulate {
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Heatmap snapshots per phase besides the initial one.
        #[arg(long, default_value_t = 0)]
        snapshots: usize,
    },
    /// Run a scenario with receding-horizon preference optimization.
    Optimize {
        scenario: PathBuf,
        /// Optimization window in seconds, applied to every phase.
        #[arg(long)]
        nt_opt: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        repeats: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        snapshots: usize,
    },
    /// Compare exit lane counts on the phases that set `exit_lanes`.
    SweepLanes {
        scenario: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        lanes: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the five-road network and compare with the closed forms.
    Toy {
        #[arg(long, default_value = "D")]
        experiment: Experiment,
        #[arg(long)]
        n5: Option<f64>,
        /// Initial per-lane density; defaults to 0.1 for A and C, 0.9 otherwise.
        #[arg(long)]
        rho_init: Option<f64>,
        #[arg(long, default_value_t = 1000.0)]
        t: f64,
    },
    /// Run the acceptance checks.
    Verify {
        /// Data directory holding the road tables and `lahaina/`.
        #[arg(long)]
        data: Option<PathBuf>,
    },
}

fn load(cli: &Cli, path: &PathBuf) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::load(path)?;
    for p in &mut cfg.phases {
        if let Some(g) = cli.gamma1 {
            p.gamma1 = g;
        }
        if let Some(g) = cli.gamma2 {
            p.gamma2 = g;
        }
    }
    if let Some(c) = cli.cfl {
        cfg.cfl_nu = c;
    }
    if let Some(d) = cli.dx {
        cfg.dx_target_mi = d;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn report(r: &ScenarioResult) {
    for p in &r.phases {
        println!(
            "{:<10} t0={:>6.0}s dur={:>6.0}s steps={:>7} entered={:>9.2} exited={:>9.2} weighted={:>12.2} discarded={:>7.2}{}",
            p.name,
            p.start_s,
            p.duration_s,
            p.steps,
            p.cars_entered,
            p.cars_exited,
            p.weighted_time_integrated,
            p.discarded_vehicles,
            p.flooded_at_s.map_or(String::new(), |t| format!(" flooded at {t:.0}s"))
        );
    }
    let t = &r.totals;
    println!(
        "total      entered={:.2} exited={:.2} weighted={:.2} discarded={:.2}",
        t.cars_entered, t.cars_exited, t.weighted_time_integrated, t.discarded_vehicles
    );
}

fn out_dir(out: &Option<PathBuf>) -> Result<()> {
    if let Some(d) = out {
        std::fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.cmd {
        Cmd::Simulate { scenario, out, snapshots } => {
            let mut cfg = load(cli, scenario)?;
            for p in &mut cfg.phases {
                p.nt_opt_s = 0.0;
            }
            out_dir(out)?;
            report(&run_scenario(&cfg, &RunOptions { out: out.clone(), snapshots: *snapshots })?);
        }
        Cmd::Optimize { scenario, nt_opt, seed, repeats, out, snapshots } => {
            let mut cfg = load(cli, scenario)?;
            if !(*nt_opt > 0.0) {
                return Err(Error::InvalidParameter(format!("--nt-opt must be positive, got {nt_opt}")));
            }
            for p in &mut cfg.phases {
                p.nt_opt_s = *nt_opt;
            }
            if let Some(s) = seed {
                cfg.seed = *s;
            }
            if let Some(r) = repeats {
                cfg.repeats = *r;
            }
            cfg.validate()?;
            out_dir(out)?;
            let r = run_scenario(&cfg, &RunOptions { out: out.clone(), snapshots: *snapshots })?;
            report(&r);
            for p in &r.phases {
                println!("{} preferences {:?}", p.name, p.final_preferences);
            }
        }
        Cmd::SweepLanes { scenario, lanes, out } => {
            let cfg = load(cli, scenario)?;
            out_dir(out)?;
            let s = lane_reversal_experiment(&cfg, lanes, &RunOptions { out: out.clone(), snapshots: 0 })?;
            for ((l, t), adv) in s.lanes.iter().zip(&s.totals).zip(s.advantage()) {
                println!("lanes={l} exited={:.2} entered={:.2} advantage={adv:+.2}", t.cars_exited, t.cars_entered);
            }
        }
        Cmd::Toy { experiment, n5, rho_init, t } => {
            let exp = *experiment;
            let free = matches!(exp, Experiment::A | Experiment::C);
            let mut p = ToyParams { rho_init: rho_init.unwrap_or(if free { 0.1 } else { 0.9 }), ..Default::default() };
            if let Some(n) = n5 {
                p.n5 = *n;
            }
            let dx = cli.dx.unwrap_or(0.01);
            let (run, _) = toy::simulate(&p, exp, *t, dx, cli.cfl.unwrap_or(0.5))?;
            let t_hr = t / 3600.0;
            println!("experiment {exp:?} n5={} rho_init={} T={t}s dx={dx}", p.n5, p.rho_init);
            println!("engine      exited={:.4} entered={:.4} weighted={:.4}", run.cars_exited, run.cars_entered, run.weighted_time_integrated);
            match toy::cars_exited_closed_form(&p, exp, t_hr) {
                Ok(c) => println!("closed form exited={c:.4}"),
                Err(e) => println!("closed form exited unavailable: {e}"),
            }
            match toy::weighted_cars_closed_form(&p, exp, t_hr) {
                Ok(w) => println!("closed form weighted={w:.4}"),
                Err(e) => println!("closed form weighted unavailable: {e}"),
            }
        }
        Cmd::Verify { data } => {
            let dir = data.clone().unwrap_or_else(verify::default_data_dir);
            let results = verify::run_all(&dir);
            for r in &results {
                println!("{r}");
            }
            let passed = results.iter().filter(|r| r.pass).count();
            println!("{passed} of {} criteria passed", results.len());
            return Ok(passed == results.len());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
