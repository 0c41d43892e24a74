//! Direct and Fourier engines, the weighted convolution bound and gradients.

use std::time::Instant;

use nfield::convolution::{
    certify_convolution_bound, convolve, convolve_gradient, ConvolutionPlan, Engine,
    RandomFieldSampler,
};
use nfield::grid::GridSpec;
use nfield::kernel::{make_kernel, KernelFamily};
use nfield::weight::{make_weight, WeightFamily};

fn main() -> nfield::error::Result<()> {
    let grid = GridSpec::symmetric(2, 129, 4.0)?;
    let kernel = make_kernel(
        KernelFamily::Bump { amplitude: 1.0 },
        2,
        grid.spacing(),
        Some(1.0),
    )?;
    let direct = ConvolutionPlan::new(Engine::Direct, &kernel, &grid)?;
    let fourier = direct.with_engine(Engine::Fourier)?;

    let u = RandomFieldSampler::new(&grid, 7).draw();
    let t = Instant::now();
    let a = convolve(&direct, &u)?;
    let t_direct = t.elapsed();
    let t = Instant::now();
    let b = convolve(&fourier, &u)?;
    let t_fourier = t.elapsed();
    let diff = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    println!("129x129 grid: direct {t_direct:?}, fourier {t_fourier:?}, max difference {diff:.2e}");

    let g = convolve_gradient(&direct, &u, 0)?;
    println!(
        "sup |d/dx (J*u)| = {:.4} <= S sup|u| = {:.4}",
        g.sup_norm(),
        kernel.deriv_bound() * u.sup_norm()
    );

    for family in [
        WeightFamily::Exponential { rate: 1.0 },
        WeightFamily::PolynomialDecay { exponent: 3.0 },
    ] {
        let weight = make_weight(family, 2)?;
        let report = certify_convolution_bound(&fourier, &weight, 2.0, 200, 1)?;
        println!(
            "{family:?}: max |J*u|/|u| = {:.4}, bound K^(1/p) |J|_1 = {:.4}, pass = {}",
            report.max_ratio, report.bound, report.pass
        );
    }
    Ok(())
}
