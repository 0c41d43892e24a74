//! The energy G decays along trajectories and its rate matches dG/dt.

use nfield::analysis::check_h6;
use nfield::convolution::{ConvolutionPlan, Engine};
use nfield::dynamics::{homogeneous_equilibrium, simulate, ModelParams, SimConfig};
use nfield::firing::FiringRate;
use nfield::grid::{Field, GridSpec};
use nfield::kernel::{make_kernel, KernelFamily};
use nfield::weight::{make_weight, WeightFamily, WeightedLp};

fn main() -> nfield::error::Result<()> {
    let grid = GridSpec::symmetric(1, 513, 8.0)?;
    let kernel = make_kernel(
        KernelFamily::PolynomialBump { coefficient: 1.0 },
        1,
        grid.spacing(),
        Some(1.0),
    )?;
    let firing = FiringRate::sigmoid(1.0, 4.0, 0.5)?;
    let params = ModelParams::new(
        ConvolutionPlan::new(Engine::Direct, &kernel, &grid)?,
        firing,
        0.1,
    )?;
    let norm = WeightedLp::new(
        &make_weight(WeightFamily::Exponential { rate: 1.0 }, 1)?,
        &grid,
        2.0,
    )?;
    let u0 = homogeneous_equilibrium(&firing, params.l1_norm(), 0.1)?.u0;

    let start = Field::from_fn(grid, |x| u0 + 1.5 * (-2.0 * x[0] * x[0]).exp())?;
    let h6 = check_h6(&start, &params, u0, &[0.25, 0.5, 0.75, 1.0])?;
    println!(
        "excited mass over nested boxes: {:?}, converged = {}",
        h6.tail_masses, h6.converged
    );

    let config = SimConfig {
        t_end: 4.0,
        record_every: 250,
        ..SimConfig::default()
    };
    let traj = simulate(&params, &config, &norm, &start)?;
    let d = &traj.diagnostics;
    let g = d.lyapunov_g.as_ref().expect("sigmoid firing is invertible");
    let rate = d.dg_dt.as_ref().unwrap();
    for i in 0..d.len() {
        println!(
            "t = {:4.2}  G = {:+.8}  dG/dt = {:+.3e}",
            d.t[i], g[i], rate[i]
        );
    }
    Ok(())
}
