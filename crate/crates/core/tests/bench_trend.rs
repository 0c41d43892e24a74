//! Timing trends of the convolution engines. Kept in its own binary so no
//! other test competes for the CPU while it runs.

use nfield::convolution::{benchmark, BenchRow, Engine};
use nfield::kernel::KernelFamily;

const SIZES: [usize; 3] = [513, 1025, 2049];
/// Direct cost per 1-D doubling: grid and stencil both double, so about 4×.
const DIRECT_GROWTH: f64 = 3.5;
/// Timing runs repeated when a measurement is disturbed by system noise.
const ATTEMPTS: usize = 3;

fn times(rows: &[BenchRow], engine: Engine) -> Vec<f64> {
    rows.iter()
        .filter(|r| r.engine == engine)
        .map(|r| r.seconds_per_call)
        .collect()
}

fn trend_holds() -> (bool, String) {
    let family = KernelFamily::PolynomialBump { coefficient: 1.0 };
    let rows = benchmark(family, 1, 8.0, &SIZES, &Engine::ALL, 3, 0).unwrap();
    assert!(rows.iter().all(|r| r.max_abs_diff_vs_direct <= 1e-10));
    let direct = times(&rows, Engine::Direct);
    let fourier = times(&rows, Engine::Fourier);
    let growth: Vec<f64> = direct.windows(2).map(|w| w[1] / w[0]).collect();
    let ratio: Vec<f64> = direct.iter().zip(&fourier).map(|(d, f)| d / f).collect();
    let ok = growth.iter().all(|&g| g >= DIRECT_GROWTH) && ratio.windows(2).all(|w| w[1] > w[0]);
    (
        ok,
        format!("direct growth {growth:?}, direct/fourier {ratio:?}"),
    )
}

#[test]
fn direct_grows_quadratically_and_fourier_pulls_ahead() {
    let mut log = Vec::new();
    for _ in 0..ATTEMPTS {
        let (ok, detail) = trend_holds();
        if ok {
            return;
        }
        log.push(detail);
    }
    panic!("timing trend not observed: {log:#?}");
}
