//! Subcommand drivers behind the `nfield` binary. Each writes its artefacts
//! into an output directory and reports whether every check it ran passed.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::json;

pub use config::{parse_config, FiringChoice, KernelChoice, RunConfig, WeightChoice};

use crate::analysis::{
    certify_absorbing, certify_linf_bound, initial_conditions, sample_attractor,
    semicontinuity_experiment, SemicontinuitySetup,
};
use crate::convolution::{
    bench_csv, benchmark, certify_convolution_bound, ConvolutionPlan, Engine,
};
use crate::dynamics::{certify_lipschitz, homogeneous_equilibrium, simulate, SimConfig};
use crate::error::{Error, Result};
use crate::grid::write_snapshot;
use crate::kernel::verify_h4;
use crate::weight::verify_h2;

/// Energy may rise by at most this much, relative to `1 + |G|`, per record.
pub const ENERGY_STEP_SLACK: f64 = 1e-10;
/// Largest accepted equilibrium residual.
pub const EQUILIBRIUM_RESIDUAL: f64 = 1e-12;
/// Tolerance when checking that the semidistance shrinks with `ε`.
pub const MONOTONE_TOL: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Verify,
    Equilibrium,
    Energy,
    Semicontinuity,
    Bench,
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "simulate" => Command::Simulate,
            "verify" => Command::Verify,
            "equilibrium" => Command::Equilibrium,
            "energy" => Command::Energy,
            "semicontinuity" => Command::Semicontinuity,
            "bench" => Command::Bench,
            other => return Err(Error::Parameter(format!("unknown subcommand `{other}`"))),
        })
    }
}

/// Flags that override or extend the config file.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub sizes: Option<Vec<usize>>,
    pub engine: Option<Engine>,
    pub trials: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub pass: bool,
    pub summary: String,
    pub files: Vec<PathBuf>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub details: serde_json::Value,
}

/// Default grid sizes per axis for `bench`.
pub fn default_bench_sizes(dim: usize) -> Vec<usize> {
    match dim {
        1 => vec![257, 513, 1025, 2049],
        2 => vec![65, 129, 257],
        _ => vec![33, 65],
    }
}

pub fn run(
    command: Command,
    config: &RunConfig,
    out: &Path,
    options: &RunOptions,
) -> Result<RunOutcome> {
    fs::create_dir_all(out)?;
    let mut config = config.clone();
    if let Some(trials) = options.trials {
        if trials == 0 {
            return Err(Error::Parameter("--trials must be at least 1".into()));
        }
        config.trials = trials;
    }
    if let Some(engine) = options.engine {
        config.engine = engine;
    }
    match command {
        Command::Simulate => run_simulate(&config, out),
        Command::Verify => run_verify(&config, out),
        Command::Equilibrium => run_equilibrium(&config, out),
        Command::Energy => run_energy(&config, out),
        Command::Semicontinuity => run_semicontinuity(&config, out),
        Command::Bench => run_bench(&config, out, options),
    }
}

fn write(out: &Path, name: &str, contents: &[u8], files: &mut Vec<PathBuf>) -> Result<()> {
    let path = out.join(name);
    fs::write(&path, contents)?;
    files.push(path);
    Ok(())
}

fn run_simulate(config: &RunConfig, out: &Path) -> Result<RunOutcome> {
    let grid = config.grid()?;
    let params = config.model(&grid)?;
    let norm = config.norm(&grid)?;
    let u0 = initial_conditions(&params, &norm, 1, config.seed)?.remove(0);
    let traj = simulate(&params, &config.sim_config(), &norm, &u0)?;
    let mut files = Vec::new();
    write(
        out,
        "diagnostics.csv",
        traj.diagnostics.to_csv().as_bytes(),
        &mut files,
    )?;
    let mut snapshot = Vec::new();
    write_snapshot(traj.final_state(), &mut snapshot)?;
    write(out, "final.nfld", &snapshot, &mut files)?;
    let d = &traj.diagnostics;
    Ok(RunOutcome {
        pass: true,
        summary: format!(
            "simulated to t = {}: weighted norm {:.6}, sup norm {:.6}",
            traj.final_time(),
            d.lp_norm.last().unwrap(),
            d.sup_norm.last().unwrap()
        ),
        files,
    })
}

fn run_verify(config: &RunConfig, out: &Path) -> Result<RunOutcome> {
    let grid = config.grid()?;
    let params = config.model(&grid)?;
    let norm = config.norm(&grid)?;
    let weight = config.weight()?;
    let mut checks = Vec::new();

    let h2 = verify_h2(&weight, &grid)?;
    checks.push(Check {
        name: "H2",
        pass: h2.pass,
        details: serde_json::to_value(h2).unwrap(),
    });
    let h4 = verify_h4(params.kernel());
    checks.push(Check {
        name: "H4",
        pass: h4.pass,
        details: serde_json::to_value(h4).unwrap(),
    });
    let bound =
        certify_convolution_bound(params.plan(), &weight, config.p, config.trials, config.seed)?;
    checks.push(Check {
        name: "Lemma 2.1",
        pass: bound.pass,
        details: serde_json::to_value(bound).unwrap(),
    });
    let lip = certify_lipschitz(&params, &norm, config.trials, config.seed)?;
    checks.push(Check {
        name: "Prop 2.2",
        pass: lip.pass,
        details: serde_json::to_value(lip).unwrap(),
    });

    // start far outside the ball: ‖u(0)‖ = 10 R
    let r = params.absorbing_radius(&norm);
    let start = initial_conditions(&params, &norm, 1, config.seed)?.remove(0);
    let start_norm = norm.norm(&start)?;
    let start = start.map(|v| v * 10.0 * r / start_norm)?;
    let sim = SimConfig {
        t_end: config.t_end.max(1.0 + (1000.0f64).ln()),
        ..config.sim_config()
    };
    let traj = simulate(&params, &sim, &norm, &start)?;
    let absorbing = certify_absorbing(&traj, &norm, &params)?;
    checks.push(Check {
        name: "Lemma 3.1",
        pass: absorbing.pass,
        details: serde_json::to_value(absorbing).unwrap(),
    });

    let sample = sample_attractor(
        &params,
        &config.sim_config(),
        &norm,
        config.n_initial,
        config.t_transient,
        config.t_sample,
    )?;
    let linf = certify_linf_bound(&sample)?;
    checks.push(Check {
        name: "Thm 4.1",
        pass: linf.pass,
        details: serde_json::to_value(linf).unwrap(),
    });

    let pass = checks.iter().all(|c| c.pass);
    let report = json!({ "pass": pass, "checks": checks });
    let mut files = Vec::new();
    let text = serde_json::to_string_pretty(&report).unwrap() + "\n";
    write(out, "verify.json", text.as_bytes(), &mut files)?;
    let summary = checks
        .iter()
        .map(|c| format!("{}: {}", c.name, if c.pass { "pass" } else { "FAIL" }))
        .collect::<Vec<_>>()
        .join(", ");
    Ok(RunOutcome {
        pass,
        summary,
        files,
    })
}

fn run_equilibrium(config: &RunConfig, out: &Path) -> Result<RunOutcome> {
    let grid = config.grid()?;
    let kernel = config.kernel(&grid)?;
    let firing = config.firing_rate()?;
    let eq = homogeneous_equilibrium(&firing, kernel.l1_norm(), config.h)?;
    let pass = eq.residual <= EQUILIBRIUM_RESIDUAL;
    let report = json!({
        "u0": eq.u0,
        "unique": eq.unique,
        "residual": eq.residual,
        "l1_norm": kernel.l1_norm(),
        "lipschitz_constant": firing.lipschitz_constant(),
        "h": config.h,
        "pass": pass,
    });
    let mut files = Vec::new();
    let text = serde_json::to_string_pretty(&report).unwrap() + "\n";
    write(out, "equilibrium.json", text.as_bytes(), &mut files)?;
    Ok(RunOutcome {
        pass,
        summary: format!(
            "u0 = {}, unique = {}, residual = {:e}",
            eq.u0, eq.unique, eq.residual
        ),
        files,
    })
}

fn run_energy(config: &RunConfig, out: &Path) -> Result<RunOutcome> {
    let grid = config.grid()?;
    let params = config.model(&grid)?;
    if !params.firing().is_strictly_increasing() {
        return Err(Error::NotInvertible(
            "energy needs a strictly increasing firing rate (firing.family = sigmoid)".into(),
        ));
    }
    let norm = config.norm(&grid)?;
    let u0 = initial_conditions(&params, &norm, 1, config.seed)?.remove(0);
    let traj = simulate(&params, &config.sim_config(), &norm, &u0)?;
    let d = &traj.diagnostics;
    let g = d.lyapunov_g.as_ref().unwrap();
    let rate = d.dg_dt.as_ref().unwrap();
    let monotone = g
        .windows(2)
        .all(|w| w[1] <= w[0] + ENERGY_STEP_SLACK * (1.0 + w[0].abs()));
    let signed = rate.iter().all(|&r| r <= 0.0);
    let mut csv = String::from("t,lyapunov_G,dG_dt\n");
    for k in 0..d.len() {
        csv.push_str(&format!("{},{:e},{:e}\n", d.t[k], g[k], rate[k]));
    }
    let mut files = Vec::new();
    write(out, "energy.csv", csv.as_bytes(), &mut files)?;
    Ok(RunOutcome {
        pass: monotone && signed,
        summary: format!(
            "G from {:.6e} to {:.6e}; nonincreasing: {monotone}; rate never positive: {signed}",
            g[0],
            g[g.len() - 1]
        ),
        files,
    })
}

fn run_semicontinuity(config: &RunConfig, out: &Path) -> Result<RunOutcome> {
    let grid = config.grid()?;
    let j0 = config.base_kernel(&grid)?;
    let j1 = config.partner_kernel(&grid)?;
    let plan = ConvolutionPlan::new(config.engine, &j0, &grid)?;
    let params = crate::dynamics::ModelParams::new(plan, config.firing_rate()?, config.h)?;
    let norm = config.norm(&grid)?;
    let report = semicontinuity_experiment(
        &SemicontinuitySetup {
            j0: &j0,
            j1: &j1,
            params: &params,
            config: &config.sim_config(),
            norm: &norm,
            n_initial: config.n_initial,
            t_transient: config.t_transient,
            t_sample: config.t_sample,
        },
        &config.epsilons,
    )?;
    let monotone = report
        .rows
        .windows(2)
        .all(|w| w[1].semidistance < w[0].semidistance - MONOTONE_TOL);
    let mut files = Vec::new();
    write(
        out,
        "semicontinuity.csv",
        report.to_csv().as_bytes(),
        &mut files,
    )?;
    Ok(RunOutcome {
        pass: monotone && report.contained,
        summary: format!(
            "d(ε) = {:?}; decreasing: {monotone}; contained in R_max = {:.6}: {}",
            report
                .rows
                .iter()
                .map(|r| r.semidistance)
                .collect::<Vec<_>>(),
            report.r_max,
            report.contained
        ),
        files,
    })
}

fn run_bench(config: &RunConfig, out: &Path, options: &RunOptions) -> Result<RunOutcome> {
    let sizes = options
        .sizes
        .clone()
        .unwrap_or_else(|| default_bench_sizes(config.dim));
    let engines: Vec<Engine> = match options.engine {
        Some(e) => vec![e],
        None => Engine::ALL.to_vec(),
    };
    let rows = benchmark(
        config.kernel.family(),
        config.dim,
        config.half_width,
        &sizes,
        &engines,
        config.trials,
        config.seed,
    )?;
    let mut files = Vec::new();
    write(out, "bench.csv", bench_csv(&rows).as_bytes(), &mut files)?;
    Ok(RunOutcome {
        pass: true,
        summary: format!("{} timings, engines agree within 1e-10", rows.len()),
        files,
    })
}
