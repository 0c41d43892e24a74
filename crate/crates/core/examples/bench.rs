//! Engine timings across grid sizes.

use nfield::convolution::{bench_csv, benchmark, Engine};
use nfield::kernel::KernelFamily;

fn main() -> nfield::error::Result<()> {
    let family = KernelFamily::PolynomialBump { coefficient: 1.0 };
    let rows = benchmark(
        family,
        1,
        8.0,
        &[257, 513, 1025, 2049, 4097],
        &Engine::ALL,
        3,
        0,
    )?;
    print!("{}", bench_csv(&rows));
    let rows = benchmark(family, 2, 4.0, &[33, 65, 129], &Engine::ALL, 2, 0)?;
    print!("{}", bench_csv(&rows));
    Ok(())
}
