//! Attractors of J_eps = (1 - eps) J0 + eps J1 approach that of J0.

use nfield::analysis::{semicontinuity_experiment, SemicontinuitySetup};
use nfield::convolution::{ConvolutionPlan, Engine};
use nfield::dynamics::{ModelParams, SimConfig};
use nfield::firing::FiringRate;
use nfield::grid::GridSpec;
use nfield::kernel::{make_kernel, KernelFamily};
use nfield::weight::{make_weight, WeightFamily, WeightedLp};

fn main() -> nfield::error::Result<()> {
    let grid = GridSpec::symmetric(1, 641, 20.0)?;
    let j0 = make_kernel(
        KernelFamily::PolynomialBump { coefficient: 1.0 },
        1,
        grid.spacing(),
        Some(1.0),
    )?;
    let j1 = make_kernel(
        KernelFamily::Bump { amplitude: 1.0 },
        1,
        grid.spacing(),
        Some(2.0),
    )?;
    let params = ModelParams::new(
        ConvolutionPlan::new(Engine::Direct, &j0, &grid)?,
        FiringRate::sigmoid(1.0, 1.0, 0.5)?,
        0.1,
    )?;
    let norm = WeightedLp::new(
        &make_weight(WeightFamily::Exponential { rate: 1.0 }, 1)?,
        &grid,
        2.0,
    )?;
    let config = SimConfig {
        dt: 0.01,
        ..SimConfig::default()
    };
    let setup = SemicontinuitySetup {
        j0: &j0,
        j1: &j1,
        params: &params,
        config: &config,
        norm: &norm,
        n_initial: 2,
        t_transient: 20.0,
        t_sample: 2.0,
    };
    let report = semicontinuity_experiment(&setup, &[0.2, 0.1, 0.05, 0.025])?;
    print!("{}", report.to_csv());
    println!(
        "all states inside the ball of radius {:.4}: {}",
        report.r_max, report.contained
    );
    Ok(())
}
