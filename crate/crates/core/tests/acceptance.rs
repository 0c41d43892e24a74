//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the lines always print.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nfield::analysis::{
    certify_absorbing, certify_linf_bound, sample_attractor, semicontinuity_experiment,
    SemicontinuitySetup, ABSORBING_SLACK, LINF_SLACK,
};
use nfield::convolution::{
    convolution_bound_sweep, convolve, ConvolutionPlan, Engine, RandomFieldSampler,
};
use nfield::dynamics::{
    certify_lipschitz, homogeneous_equilibrium, resting_stimulus, simulate, step_rk4, Integrator,
    ModelParams, SimConfig,
};
use nfield::error::Result;
use nfield::firing::FiringRate;
use nfield::grid::{Field, GridSpec};
use nfield::kernel::{make_kernel, Kernel, KernelFamily};
use nfield::weight::{make_weight, Weight, WeightFamily, WeightedLp};

use common::{damped_fixed_point, max_abs_diff, observed_order};

const NORM_TOL: f64 = 1e-6;
const BOUND_SLACK: f64 = 1e-6;
const EQ_RESIDUAL_TOL: f64 = 1e-12;
const EQ_AGREEMENT_TOL: f64 = 1e-10;
const LYAPUNOV_STEP_SLACK: f64 = 1e-10;
const LYAPUNOV_RATE_ABS: f64 = 1e-4;
const LYAPUNOV_RATE_REL: f64 = 0.05;
const MONOTONE_TOL: f64 = 1e-5;
const SEMIDISTANCE_TOL: f64 = 1e-4;
const ENGINE_TOL: f64 = 1e-10;
const EULER_ORDER: (f64, f64) = (0.8, 1.2);
const RK4_ORDER: (f64, f64) = (3.5, 4.3);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Result<Verdict> {
    Ok(Verdict { pass, detail })
}

fn weights(dim: usize) -> Vec<(&'static str, Weight)> {
    vec![
        (
            "exponential",
            make_weight(WeightFamily::Exponential { rate: 1.0 }, dim).unwrap(),
        ),
        (
            "polynomial",
            make_weight(
                WeightFamily::PolynomialDecay {
                    exponent: dim as f64 + 1.0,
                },
                dim,
            )
            .unwrap(),
        ),
    ]
}

fn unit_kernel(grid: &GridSpec) -> Kernel {
    make_kernel(
        KernelFamily::PolynomialBump { coefficient: 1.0 },
        grid.dim(),
        grid.spacing(),
        Some(1.0),
    )
    .unwrap()
}

fn model(grid: &GridSpec, firing: FiringRate, h: f64, engine: Engine) -> ModelParams {
    let plan = ConvolutionPlan::new(engine, &unit_kernel(grid), grid).unwrap();
    ModelParams::new(plan, firing, h).unwrap()
}

fn standard_sigmoid() -> FiringRate {
    FiringRate::sigmoid(1.0, 4.0, 0.5).unwrap()
}

fn exp_norm(grid: &GridSpec, p: f64) -> WeightedLp {
    WeightedLp::new(&weights(grid.dim())[0].1, grid, p).unwrap()
}

fn c1_normalization() -> Result<Verdict> {
    let mut worst = 0.0f64;
    for (dim, points) in [(1, 2049), (2, 257)] {
        let grid = GridSpec::symmetric(dim, points, 8.0)?;
        let one = Field::constant(grid.clone(), 1.0)?;
        for (_, w) in weights(dim) {
            for p in [1.5, 2.0, 3.0] {
                worst = worst.max((WeightedLp::new(&w, &grid, p)?.norm(&one)? - 1.0).abs());
            }
        }
    }
    verdict(
        worst <= NORM_TOL,
        format!("max |‖1‖ - 1| = {worst:.2e} (tol {NORM_TOL:e})"),
    )
}

fn c2_convolution_bound() -> Result<Verdict> {
    let mut details = Vec::new();
    let mut pass = true;
    for (dim, points, engine) in [(1, 2049, Engine::Direct), (2, 257, Engine::Fourier)] {
        let grid = GridSpec::symmetric(dim, points, 8.0)?;
        let plan = ConvolutionPlan::new(engine, &unit_kernel(&grid), &grid)?;
        let norms: Vec<WeightedLp> = weights(dim)
            .iter()
            .flat_map(|(_, w)| [1.5, 2.0, 3.0].map(|p| WeightedLp::new(w, &grid, p).unwrap()))
            .collect();
        for report in convolution_bound_sweep(&plan, &norms, 1000, 21 + dim as u64)? {
            pass &= report.max_ratio <= report.bound * (1.0 + BOUND_SLACK);
            details.push(format!(
                "N={dim} K={:.3} p={}: {:.4}/{:.4}",
                report.k, report.p, report.max_ratio, report.bound
            ));
        }
    }
    verdict(
        pass,
        format!("max ratio / bound over 1000 fields: {}", details.join(", ")),
    )
}

fn c3_lipschitz() -> Result<Verdict> {
    let grid = GridSpec::symmetric(1, 1025, 8.0)?;
    let params = model(&grid, standard_sigmoid(), 0.1, Engine::Direct);
    let mut pass = true;
    let mut details = Vec::new();
    for (name, w) in weights(1) {
        for p in [1.5, 2.0, 3.0] {
            let r = certify_lipschitz(&params, &WeightedLp::new(&w, &grid, p)?, 1000, 31)?;
            pass &= r.max_quotient <= r.bound * (1.0 + BOUND_SLACK);
            details.push(format!(
                "{name} p={p}: {:.4}/{:.4}",
                r.max_quotient, r.bound
            ));
        }
    }
    verdict(
        pass,
        format!(
            "max quotient / bound over 1000 pairs: {}",
            details.join(", ")
        ),
    )
}

fn c4_absorbing() -> Result<Verdict> {
    let grid = GridSpec::symmetric(1, 1025, 8.0)?;
    let params = model(&grid, standard_sigmoid(), 0.1, Engine::Direct);
    let norm = exp_norm(&grid, 2.0);
    let r = params.absorbing_radius(&norm);
    let config = SimConfig {
        dt: 1e-3,
        t_end: 30.0,
        record_every: 1,
        ..SimConfig::default()
    };
    let mut sampler = RandomFieldSampler::new(&grid, 41);
    let mut pass = true;
    let mut worst = f64::NEG_INFINITY;
    let mut entries = Vec::new();
    for _ in 0..3 {
        let u = sampler.draw();
        let u0 = u.map(|v| v * 10.0 * r / norm.norm(&u).unwrap())?;
        let traj = simulate(&params, &config, &norm, &u0)?;
        let report = certify_absorbing(&traj, &norm, &params)?;
        pass &= report.pass;
        worst = worst.max(report.max_violation);
        entries.push(format!(
            "{:.3}<={:.3}",
            report.last_time_outside.unwrap_or(0.0),
            report.entry_time_bound
        ));
    }
    verdict(
        pass,
        format!(
            "R = {r:.4}, max violation {worst:.2e} (tol {ABSORBING_SLACK:e}), last exit vs ln(‖u0‖/ε): {}",
            entries.join(", ")
        ),
    )
}

fn c5_linf() -> Result<Verdict> {
    let grid = GridSpec::symmetric(1, 1025, 8.0)?;
    let params = model(&grid, standard_sigmoid(), 0.1, Engine::Direct);
    let norm = exp_norm(&grid, 2.0);
    let config = SimConfig {
        seed: 51,
        ..SimConfig::default()
    };
    let sample = sample_attractor(&params, &config, &norm, 8, 20.0, 5.0)?;
    let report = certify_linf_bound(&sample)?;

    // integrator invariant from states already inside the bound
    let r = params.linf_radius();
    let mut sampler = RandomFieldSampler::new(&grid, 52).with_amplitude(r);
    let mut excess = f64::NEG_INFINITY;
    let stepwise = SimConfig {
        t_end: 5.0,
        record_every: 1,
        ..SimConfig::default()
    };
    for _ in 0..4 {
        let u0 = sampler.draw().map(|v| v.clamp(-r, r))?;
        let traj = simulate(&params, &stepwise, &norm, &u0)?;
        for s in &traj.diagnostics.sup_norm {
            excess = excess.max(s - r);
        }
    }
    verdict(
        report.pass && excess <= 0.0,
        format!(
            "post-transient max sup {:.6} vs r = {:.6} (+{LINF_SLACK:e} + decay), stepwise max sup - r = {excess:.2e}",
            report.max_sup, report.r
        ),
    )
}

fn c6_lyapunov() -> Result<Verdict> {
    let grid = GridSpec::symmetric(1, 1025, 8.0)?;
    let params = model(&grid, standard_sigmoid(), 0.1, Engine::Direct);
    let norm = exp_norm(&grid, 2.0);
    let config = SimConfig {
        dt: 1e-3,
        t_end: 20.0,
        record_every: 1,
        ..SimConfig::default()
    };
    let mut sampler = RandomFieldSampler::new(&grid, 61).with_amplitude(1.5);
    let (mut worst_step, mut worst_fd, mut max_rate) =
        (f64::NEG_INFINITY, 0.0f64, f64::NEG_INFINITY);
    for _ in 0..5 {
        let traj = simulate(&params, &config, &norm, &sampler.draw())?;
        let g = traj.diagnostics.lyapunov_g.as_ref().unwrap();
        let rate = traj.diagnostics.dg_dt.as_ref().unwrap();
        for k in 0..g.len() - 1 {
            worst_step = worst_step.max((g[k + 1] - g[k]) / (1.0 + g[k].abs()));
            let fd = (g[k + 1] - g[k]) / config.dt;
            let allowed = LYAPUNOV_RATE_ABS.max(LYAPUNOV_RATE_REL * rate[k].abs());
            worst_fd = worst_fd.max((fd - rate[k]).abs() / allowed);
        }
        max_rate = rate.iter().copied().fold(max_rate, f64::max);
    }
    verdict(
        worst_step <= LYAPUNOV_STEP_SLACK && worst_fd <= 1.0 && max_rate <= 0.0,
        format!(
            "max ΔG/(1+|G|) = {worst_step:.2e} (slack {LYAPUNOV_STEP_SLACK:e}), \
             max FD mismatch / allowance = {worst_fd:.3}, max rate = {max_rate:.2e}"
        ),
    )
}

fn c7_equilibrium() -> Result<Verdict> {
    let sig = standard_sigmoid();
    let eq = homogeneous_equilibrium(&sig, 1.0, 0.1)?;
    let oracle = damped_fixed_point(&sig, 1.0, 0.1);
    let mut residual = eq.residual;
    let mut agreement = (eq.u0 - oracle).abs();
    let mut round_trip = 0.0f64;
    let mut unique_ok = true;
    for (beta, l1, h) in [(2.0, 1.0, 0.1), (1.0, 1.5, 0.3), (3.0, 1.2, 0.05)] {
        let f = FiringRate::sigmoid(1.0, beta, 0.5)?;
        let eq = homogeneous_equilibrium(&f, l1, h)?;
        unique_ok &= eq.unique;
        residual = residual.max(eq.residual);
        agreement = agreement.max((eq.u0 - damped_fixed_point(&f, l1, h)).abs());
        let u = eq.u0 + 0.2;
        let back = homogeneous_equilibrium(&f, l1, resting_stimulus(&f, l1, u)?)?;
        round_trip = round_trip.max((back.u0 - u).abs());
    }
    verdict(
        residual <= EQ_RESIDUAL_TOL && agreement <= EQ_AGREEMENT_TOL && round_trip <= EQ_AGREEMENT_TOL && unique_ok,
        format!(
            "u0 = {:.12}, residual {residual:.1e}, bisection vs damped {agreement:.1e}, round trip {round_trip:.1e}",
            eq.u0
        ),
    )
}

fn c8_semicontinuity() -> Result<Verdict> {
    let grid = GridSpec::symmetric(1, 641, 20.0)?;
    let firing = FiringRate::sigmoid(1.0, 1.0, 0.5)?;
    let params = model(&grid, firing, 0.1, Engine::Direct);
    let j0 = unit_kernel(&grid);
    let j1 = make_kernel(
        KernelFamily::Bump { amplitude: 1.0 },
        1,
        grid.spacing(),
        Some(2.0),
    )?;
    let norm = exp_norm(&grid, 2.0);
    let config = SimConfig {
        seed: 81,
        ..SimConfig::default()
    };
    let epsilons = [0.2, 0.1, 0.05, 0.025];
    let report = semicontinuity_experiment(
        &SemicontinuitySetup {
            j0: &j0,
            j1: &j1,
            params: &params,
            config: &config,
            norm: &norm,
            n_initial: 4,
            t_transient: 20.0,
            t_sample: 5.0,
        },
        &epsilons,
    )?;
    let u_ref = damped_fixed_point(&firing, j0.l1_norm(), 0.1);
    let mut match_err = 0.0f64;
    for row in &report.rows {
        let u_eps = damped_fixed_point(&firing, row.l1_norm, 0.1);
        match_err = match_err.max((row.semidistance - (u_eps - u_ref).abs()).abs());
    }
    let monotone = report
        .rows
        .windows(2)
        .all(|w| w[1].semidistance < w[0].semidistance - MONOTONE_TOL);
    let d: Vec<String> = report
        .rows
        .iter()
        .map(|r| format!("{:.5}", r.semidistance))
        .collect();
    verdict(
        monotone && match_err <= SEMIDISTANCE_TOL && report.contained,
        format!(
            "d(ε) = [{}], oracle mismatch {match_err:.1e}, contained in R_max = {:.4}: {}",
            d.join(", "),
            report.r_max,
            report.contained
        ),
    )
}

fn c9_engines() -> Result<Verdict> {
    let mut worst = 0.0f64;
    for (dim, points) in [(1, 2049), (2, 257)] {
        let grid = GridSpec::symmetric(dim, points, 8.0)?;
        let direct = ConvolutionPlan::new(Engine::Direct, &unit_kernel(&grid), &grid)?;
        let fourier = direct.with_engine(Engine::Fourier)?;
        let mut sampler = RandomFieldSampler::new(&grid, 90 + dim as u64);
        for _ in 0..100 {
            let u = sampler.draw();
            worst = worst.max(max_abs_diff(
                convolve(&direct, &u)?.values(),
                convolve(&fourier, &u)?.values(),
            ));
        }
    }
    verdict(
        worst <= ENGINE_TOL,
        format!("max |fft - direct| = {worst:.2e} (tol {ENGINE_TOL:e})"),
    )
}

fn c10_orders() -> Result<Verdict> {
    let grid = GridSpec::symmetric(1, 257, 8.0)?;
    let params = model(&grid, standard_sigmoid(), 0.1, Engine::Direct);
    let norm = exp_norm(&grid, 2.0);
    let u0 = Field::from_fn(grid.clone(), |x| 1.2 * (-x[0] * x[0] / 2.0).exp() - 0.3)?;
    let mut reference = u0.clone();
    for _ in 0..10_000 {
        reference = step_rk4(&params, &reference, 1e-4)?;
    }
    let error = |integrator, dt| -> Result<f64> {
        let cfg = SimConfig {
            dt,
            t_end: 1.0,
            integrator,
            record_every: 1000,
            ..SimConfig::default()
        };
        let end = simulate(&params, &cfg, &norm, &u0)?;
        Ok(max_abs_diff(end.final_state().values(), reference.values()))
    };
    let ee: Vec<f64> = [0.02, 0.01, 0.005]
        .iter()
        .map(|&dt| error(Integrator::ExponentialEuler, dt))
        .collect::<Result<_>>()?;
    let rk: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&dt| error(Integrator::Rk4, dt))
        .collect::<Result<_>>()?;
    let ee_orders = [observed_order(ee[0], ee[1]), observed_order(ee[1], ee[2])];
    let rk_orders = [observed_order(rk[0], rk[1]), observed_order(rk[1], rk[2])];
    let within = |o: &[f64; 2], (lo, hi): (f64, f64)| o.iter().all(|v| (lo..=hi).contains(v));
    verdict(
        within(&ee_orders, EULER_ORDER) && within(&rk_orders, RK4_ORDER),
        format!(
            "exponential Euler orders {:.3}, {:.3} (window {:?}); RK4 orders {:.3}, {:.3} (window {:?})",
            ee_orders[0], ee_orders[1], EULER_ORDER, rk_orders[0], rk_orders[1], RK4_ORDER
        ),
    )
}

type Check = fn() -> Result<Verdict>;

fn main() -> ExitCode {
    let checks: [(u32, &str, Check, Duration); 10] = [
        (
            1,
            "norm normalization",
            c1_normalization,
            Duration::from_secs(1),
        ),
        (
            2,
            "convolution norm bound",
            c2_convolution_bound,
            Duration::from_secs(120),
        ),
        (
            3,
            "Lipschitz bound of the vector field",
            c3_lipschitz,
            Duration::from_secs(60),
        ),
        (4, "absorbing ball", c4_absorbing, Duration::from_secs(120)),
        (
            5,
            "sup-norm attractor bound",
            c5_linf,
            Duration::from_secs(120),
        ),
        (6, "Lyapunov decay", c6_lyapunov, Duration::from_secs(120)),
        (
            7,
            "homogeneous equilibrium",
            c7_equilibrium,
            Duration::from_secs(1),
        ),
        (
            8,
            "attractor upper semicontinuity",
            c8_semicontinuity,
            Duration::from_secs(300),
        ),
        (9, "engine equivalence", c9_engines, Duration::from_secs(60)),
        (
            10,
            "integrator orders",
            c10_orders,
            Duration::from_secs(120),
        ),
    ];
    let mut failures = 0;
    for (id, name, check, budget) in checks {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(v) => (v.pass && elapsed <= budget, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {id:>2} [{}] {name}: {detail}; {:.2} s (budget {} s)",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
