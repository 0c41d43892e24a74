//! End-to-end dynamics and attractor scenarios.

use nfield::analysis::{
    certify_absorbing, certify_linf_bound, check_h6, lyapunov_g, lyapunov_rate, sample_attractor,
    sample_from, semidistance, semidistance_of,
};
use nfield::convolution::{ConvolutionPlan, Engine, RandomFieldSampler};
use nfield::dynamics::{homogeneous_equilibrium, simulate, ModelParams, SimConfig};
use nfield::firing::FiringRate;
use nfield::grid::{Field, GridSpec};
use nfield::kernel::{make_kernel, KernelFamily};
use nfield::weight::{make_weight, WeightFamily, WeightedLp};

const POLY: KernelFamily = KernelFamily::PolynomialBump { coefficient: 1.0 };

fn setup(points: usize, half_width: f64, beta: f64) -> (ModelParams, WeightedLp) {
    let grid = GridSpec::symmetric(1, points, half_width).unwrap();
    let kernel = make_kernel(POLY, 1, grid.spacing(), Some(1.0)).unwrap();
    let plan = ConvolutionPlan::new(Engine::Direct, &kernel, &grid).unwrap();
    let firing = FiringRate::sigmoid(1.0, beta, 0.5).unwrap();
    let params = ModelParams::new(plan, firing, 0.1).unwrap();
    let weight = make_weight(WeightFamily::Exponential { rate: 1.0 }, 1).unwrap();
    let norm = WeightedLp::new(&weight, &grid, 2.0).unwrap();
    (params, norm)
}

fn config(t_end: f64, record_every: usize, keep: bool) -> SimConfig {
    SimConfig {
        t_end,
        record_every,
        keep_snapshots: keep,
        ..SimConfig::default()
    }
}

#[test]
fn reference_radii() {
    let (params, norm) = setup(513, 8.0, 4.0);
    let r = params.absorbing_radius(&norm);
    assert!((r - (0.5f64.exp() + 0.1)).abs() < 1e-12);
    assert!((r - 1.7487).abs() < 1e-4);
    assert!((params.linf_radius() - 1.1).abs() < 1e-12);
}

#[test]
fn large_start_enters_the_absorbing_ball_in_time() {
    let (params, norm) = setup(513, 8.0, 4.0);
    let r = params.absorbing_radius(&norm);
    let start = Field::constant(params.grid().clone(), 10.0 * r).unwrap();
    assert!((norm.norm(&start).unwrap() - 10.0 * r).abs() < 1e-9);
    let t_end = (1000.0f64).ln() + 1.0;
    let traj = simulate(&params, &config(t_end, 10, false), &norm, &start).unwrap();
    let report = certify_absorbing(&traj, &norm, &params).unwrap();
    assert!(report.pass, "{report:?}");
    assert!(report.entry_ok);
    assert!(report.last_time_outside.is_some());
    let last = *traj.diagnostics.lp_norm.last().unwrap();
    assert!(last < r + 1e-3);
}

#[test]
fn zero_start_never_leaves_either_ball() {
    let (params, norm) = setup(257, 8.0, 4.0);
    let zero = Field::zeros(params.grid().clone());
    let traj = simulate(&params, &config(4.0, 1, true), &norm, &zero).unwrap();
    let r = params.linf_radius();
    assert_eq!(traj.snapshots.len(), traj.diagnostics.len());
    for u in &traj.snapshots {
        assert!(u.sup_norm() <= r);
    }
    let report = certify_absorbing(&traj, &norm, &params).unwrap();
    assert!(report.pass);
    assert_eq!(report.entry_time_bound, 0.0);
    let rr = params.absorbing_radius(&norm);
    assert!(traj.diagnostics.lp_norm.iter().all(|&n| n <= rr + 1e-2));
}

#[test]
fn spike_decays_below_the_linf_envelope() {
    let (params, norm) = setup(257, 8.0, 4.0);
    let grid = params.grid().clone();
    let mut v = vec![0.0; grid.len()];
    v[grid.len() / 2] = 100.0;
    let spike = Field::new(grid, v).unwrap();
    let sample = sample_from(&params, &config(0.0, 10, false), &norm, &[spike], 5.0, 1.0).unwrap();
    let report = certify_linf_bound(&sample).unwrap();
    assert!(report.pass, "{report:?}");
    assert!(sample.max_sup() <= 1.1 + 1e-6 + 100.0 * (-5.0f64).exp());
}

#[test]
fn short_transient_is_rejected() {
    let (params, norm) = setup(129, 4.0, 4.0);
    assert!(sample_attractor(&params, &SimConfig::default(), &norm, 1, 4.0, 1.0).is_err());
    assert!(sample_attractor(&params, &SimConfig::default(), &norm, 0, 5.0, 1.0).is_err());
}

#[test]
fn contraction_regime_attractor_is_the_resting_state() {
    // β = 1 gives ‖J‖₁ k₁ = 1/4. A wide box keeps the truncation layer at
    // negligible weight.
    let (params, norm) = setup(641, 20.0, 1.0);
    let eq = homogeneous_equilibrium(params.firing(), params.l1_norm(), params.h()).unwrap();
    assert!(eq.unique);
    let rest = Field::constant(params.grid().clone(), eq.u0).unwrap();
    let cfg = SimConfig {
        dt: 1e-2,
        ..config(0.0, 10, false)
    };
    let sample = sample_attractor(&params, &cfg, &norm, 1, 20.0, 2.0).unwrap();
    assert!(sample.snapshots.len() > 1);
    for u in &sample.snapshots {
        assert!(norm.distance(u, &rest).unwrap() < 1e-4);
    }
    assert!(certify_linf_bound(&sample).unwrap().pass);

    let again = sample_attractor(&params, &cfg, &norm, 1, 20.0, 2.0).unwrap();
    assert_eq!(sample.snapshots, again.snapshots);
    assert_eq!(semidistance(&sample, &again, &norm).unwrap(), 0.0);
}

#[test]
fn semidistance_is_directed() {
    let grid = GridSpec::symmetric(1, 65, 4.0).unwrap();
    let weight = make_weight(WeightFamily::Exponential { rate: 1.0 }, 1).unwrap();
    let norm = WeightedLp::new(&weight, &grid, 2.0).unwrap();
    let x = Field::constant(grid.clone(), 0.3).unwrap();
    let y = Field::constant(grid.clone(), 0.8).unwrap();
    let a = vec![x.clone()];
    let b = vec![x, y];
    assert_eq!(semidistance_of(&a, &b, &norm).unwrap(), 0.0);
    assert!((semidistance_of(&b, &a, &norm).unwrap() - 0.5).abs() < 1e-12);
    assert!(semidistance_of(&a, &[], &norm).is_err());
}

#[test]
fn h6_reports() {
    let (params, _) = setup(257, 8.0, 4.0);
    let grid = params.grid().clone();
    let u0 = homogeneous_equilibrium(params.firing(), 1.0, 0.1)
        .unwrap()
        .u0;
    let fractions = [0.25, 0.5, 0.75, 1.0];

    let rest = Field::constant(grid.clone(), u0).unwrap();
    let r = check_h6(&rest, &params, u0, &fractions).unwrap();
    assert!(r.converged);
    assert!(r.tail_masses.iter().all(|&m| m == 0.0));

    let bump = Field::from_fn(grid.clone(), |x| {
        u0 + if x[0].abs() < 1.0 {
            1.0 - x[0].abs()
        } else {
            0.0
        }
    })
    .unwrap();
    let r = check_h6(&bump, &params, u0, &fractions).unwrap();
    assert!(r.converged);
    assert!(r.tail_masses[0] > 0.0);
    assert!(r
        .tail_masses
        .windows(2)
        .all(|w| (w[1] - w[0]).abs() < 1e-15));

    let lifted = Field::constant(grid, u0 + 1.0).unwrap();
    let r = check_h6(&lifted, &params, u0, &fractions).unwrap();
    assert!(!r.converged);
    let per_volume: Vec<f64> = r
        .tail_masses
        .iter()
        .zip(&fractions)
        .map(|(m, s)| m / s)
        .collect();
    for w in per_volume.windows(2) {
        assert!((w[1] - w[0]).abs() < 0.05 * w[0]);
    }
}

#[test]
fn energy_vanishes_at_rest_and_rate_is_never_positive() {
    let (params, _) = setup(257, 8.0, 4.0);
    let grid = params.grid().clone();
    let u0 = homogeneous_equilibrium(params.firing(), 1.0, 0.1)
        .unwrap()
        .u0;
    let rest = Field::constant(grid.clone(), u0).unwrap();
    assert_eq!(lyapunov_g(&rest, &params, u0).unwrap(), 0.0);
    let mut sampler = RandomFieldSampler::new(&grid, 9).with_amplitude(2.0);
    for _ in 0..20 {
        assert!(lyapunov_rate(&sampler.draw(), &params).unwrap() <= 0.0);
    }
}

#[test]
fn energy_requires_invertible_firing() {
    let grid = GridSpec::symmetric(1, 129, 4.0).unwrap();
    let kernel = make_kernel(POLY, 1, grid.spacing(), Some(1.0)).unwrap();
    let plan = ConvolutionPlan::new(Engine::Direct, &kernel, &grid).unwrap();
    let params = ModelParams::new(plan, FiringRate::ramp(1.0, 1.0, 0.2).unwrap(), 0.1).unwrap();
    let u = Field::zeros(grid);
    assert!(lyapunov_g(&u, &params, 0.5).is_err());
    assert!(lyapunov_rate(&u, &params).is_err());
}
