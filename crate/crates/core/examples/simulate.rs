//! Integrates the field equation and writes diagnostics and a snapshot.
//!
//! Usage: `cargo run --example simulate [output-dir]`

use std::fs;
use std::path::PathBuf;

use nfield::convolution::{ConvolutionPlan, Engine};
use nfield::dynamics::{simulate, ModelParams, SimConfig};
use nfield::firing::FiringRate;
use nfield::grid::{write_snapshot, Field, GridSpec};
use nfield::kernel::{make_kernel, KernelFamily};
use nfield::weight::{make_weight, WeightFamily, WeightedLp};

fn main() -> nfield::error::Result<()> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("nfield-simulate"));
    fs::create_dir_all(&out)?;

    let grid = GridSpec::symmetric(1, 1025, 8.0)?;
    let kernel = make_kernel(
        KernelFamily::PolynomialBump { coefficient: 1.0 },
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
    let start = Field::from_fn(grid, |x| 2.0 * (-x[0] * x[0]).exp())?;
    let config = SimConfig {
        t_end: 5.0,
        record_every: 100,
        ..SimConfig::default()
    };
    let traj = simulate(&params, &config, &norm, &start)?;
    let d = &traj.diagnostics;
    for i in 0..d.len() {
        println!(
            "t = {:5.2}  |u| = {:.6}  sup = {:.6}",
            d.t[i], d.lp_norm[i], d.sup_norm[i]
        );
    }
    fs::write(out.join("diagnostics.csv"), d.to_csv())?;
    write_snapshot(
        traj.final_state(),
        fs::File::create(out.join("final.nfld"))?,
    )?;
    println!("wrote {}", out.display());
    Ok(())
}
