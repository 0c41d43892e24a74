//! A large initial state is drawn into the absorbing ball of radius R.

use nfield::analysis::certify_absorbing;
use nfield::convolution::{ConvolutionPlan, Engine};
use nfield::dynamics::{simulate, ModelParams, SimConfig};
use nfield::firing::FiringRate;
use nfield::grid::{Field, GridSpec};
use nfield::kernel::{make_kernel, KernelFamily};
use nfield::weight::{make_weight, WeightFamily, WeightedLp};

fn main() -> nfield::error::Result<()> {
    let grid = GridSpec::symmetric(1, 513, 8.0)?;
    let kernel = make_kernel(
        KernelFamily::Bump { amplitude: 1.0 },
        1,
        grid.spacing(),
        Some(1.0),
    )?;
    let params = ModelParams::new(
        ConvolutionPlan::new(Engine::Direct, &kernel, &grid)?,
        FiringRate::sigmoid(1.0, 4.0, 0.5)?,
        0.1,
    )?;
    let norm = WeightedLp::new(
        &make_weight(WeightFamily::Exponential { rate: 1.0 }, 1)?,
        &grid,
        2.0,
    )?;
    let r = params.absorbing_radius(&norm);
    let start = Field::constant(grid, 10.0 * r)?;
    let config = SimConfig {
        t_end: 9.0,
        record_every: 500,
        ..SimConfig::default()
    };
    let traj = simulate(&params, &config, &norm, &start)?;
    for (t, n) in traj.diagnostics.t.iter().zip(&traj.diagnostics.lp_norm) {
        println!(
            "t = {t:4.1}  |u| = {n:9.5}  bound = {:9.5}",
            (-t).exp() * 10.0 * r + r
        );
    }
    let report = certify_absorbing(&traj, &norm, &params)?;
    println!("{report:#?}");
    Ok(())
}
