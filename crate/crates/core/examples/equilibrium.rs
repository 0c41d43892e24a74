//! Homogeneous resting states and the stimulus that produces them.

use nfield::dynamics::{homogeneous_equilibrium, resting_stimulus};
use nfield::firing::FiringRate;

fn main() -> nfield::error::Result<()> {
    for beta in [1.0, 4.0, 10.0] {
        let f = FiringRate::sigmoid(1.0, beta, 0.5)?;
        for h in [0.05, 0.1, 0.5] {
            let eq = homogeneous_equilibrium(&f, 1.0, h)?;
            println!(
                "beta = {beta:>4}, h = {h}: u0 = {:.12}, unique = {:5}, residual = {:.1e}",
                eq.u0, eq.unique, eq.residual
            );
        }
    }
    let f = FiringRate::sigmoid(1.0, 4.0, 0.5)?;
    let h = resting_stimulus(&f, 1.0, 0.9)?;
    println!("resting level 0.9 needs h = {h:.12}");
    match resting_stimulus(&f, 1.0, 0.5) {
        Ok(h) => println!("resting level 0.5 needs h = {h}"),
        Err(e) => println!("resting level 0.5: {e}"),
    }
    Ok(())
}
