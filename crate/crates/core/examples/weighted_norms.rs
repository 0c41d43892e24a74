//! Admissible weights, their H2 constants and weighted L^p norms.

use nfield::grid::{Field, GridSpec};
use nfield::weight::{make_weight, verify_h2, WeightFamily, WeightedLp};

fn main() -> nfield::error::Result<()> {
    let grid = GridSpec::symmetric(1, 1025, 8.0)?;
    let families = [
        WeightFamily::Exponential { rate: 1.0 },
        WeightFamily::PolynomialDecay { exponent: 3.0 },
    ];
    for family in families {
        let weight = make_weight(family, 1)?;
        let h2 = verify_h2(&weight, &grid)?;
        println!(
            "{family:?}: c = {:.6}, K = {:.6}, observed sup rho(x-y)/rho(x) = {:.6}, pass = {}",
            weight.normalization(),
            weight.k(),
            h2.k_observed,
            h2.pass
        );
        for p in [1.5, 2.0, 4.0] {
            let norm = WeightedLp::new(&weight, &grid, p)?;
            let one = Field::constant(grid.clone(), 1.0)?;
            let ramp = Field::from_fn(grid.clone(), |x| x[0])?;
            println!(
                "  p = {p}: |1| = {:.12}, |x| = {:.6}",
                norm.norm(&one)?,
                norm.norm(&ramp)?
            );
        }
    }
    Ok(())
}
