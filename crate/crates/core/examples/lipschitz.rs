//! Monte-Carlo Lipschitz quotient of the right-hand side in weighted L^p.

use nfield::convolution::{ConvolutionPlan, Engine};
use nfield::dynamics::{certify_lipschitz, ModelParams};
use nfield::firing::FiringRate;
use nfield::grid::GridSpec;
use nfield::kernel::{make_kernel, KernelFamily};
use nfield::weight::{make_weight, WeightFamily, WeightedLp};

fn main() -> nfield::error::Result<()> {
    let grid = GridSpec::symmetric(1, 1025, 8.0)?;
    let kernel = make_kernel(
        KernelFamily::PolynomialBump { coefficient: 1.0 },
        1,
        grid.spacing(),
        Some(1.0),
    )?;
    let plan = ConvolutionPlan::new(Engine::Fourier, &kernel, &grid)?;
    let weight = make_weight(WeightFamily::Exponential { rate: 1.0 }, 1)?;
    for beta in [1.0, 4.0, 16.0] {
        let params = ModelParams::new(plan.clone(), FiringRate::sigmoid(1.0, beta, 0.5)?, 0.1)?;
        for p in [1.5, 2.0, 3.0] {
            let norm = WeightedLp::new(&weight, &grid, p)?;
            let r = certify_lipschitz(&params, &norm, 300, 3)?;
            println!(
                "beta = {beta:>4}, p = {p}: max quotient = {:.4}, bound = {:.4}, pass = {}",
                r.max_quotient, r.bound, r.pass
            );
        }
    }
    Ok(())
}
