//! Sampled attractor states stay in the sup-norm ball of radius a|J|_1 + h.

use nfield::analysis::{certify_linf_bound, sample_attractor};
use nfield::convolution::{ConvolutionPlan, Engine};
use nfield::dynamics::{ModelParams, SimConfig};
use nfield::firing::FiringRate;
use nfield::grid::GridSpec;
use nfield::kernel::{make_kernel, KernelFamily};
use nfield::weight::{make_weight, WeightFamily, WeightedLp};

fn main() -> nfield::error::Result<()> {
    let grid = GridSpec::symmetric(2, 65, 4.0)?;
    let kernel = make_kernel(
        KernelFamily::PolynomialBump { coefficient: 1.0 },
        2,
        grid.spacing(),
        Some(1.5),
    )?;
    let params = ModelParams::new(
        ConvolutionPlan::new(Engine::Fourier, &kernel, &grid)?,
        FiringRate::sigmoid(1.0, 6.0, 0.4)?,
        0.1,
    )?;
    let norm = WeightedLp::new(
        &make_weight(WeightFamily::Exponential { rate: 1.0 }, 2)?,
        &grid,
        2.0,
    )?;
    let config = SimConfig {
        dt: 0.01,
        ..SimConfig::default()
    };
    let sample = sample_attractor(&params, &config, &norm, 4, 10.0, 5.0)?;
    let report = certify_linf_bound(&sample)?;
    println!(
        "{} snapshots from {} starts; max sup = {:.6}, r = {:.6}, allowance = {:.6}, pass = {}",
        sample.snapshots.len(),
        sample.initial_sup.len(),
        report.max_sup,
        report.r,
        report.allowance,
        report.pass
    );
    Ok(())
}
