use std::time::{Duration, Instant};

use serde::Serialize;

use super::{convolve, ConvolutionPlan, Engine, RandomFieldSampler};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::kernel::{make_kernel, KernelFamily};

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub engine: Engine,
    pub points: usize,
    pub seconds_per_call: f64,
    pub max_abs_diff_vs_direct: f64,
}

/// Agreement required between engines before anything is timed.
const AGREEMENT: f64 = 1e-10;
const MIN_BLOCK: Duration = Duration::from_millis(40);
const BLOCKS: usize = 3;

fn time_per_call(mut call: impl FnMut()) -> f64 {
    let mut best = f64::INFINITY;
    for _ in 0..BLOCKS {
        let start = Instant::now();
        let mut calls = 0u32;
        while calls == 0 || start.elapsed() < MIN_BLOCK {
            call();
            calls += 1;
        }
        best = best.min(start.elapsed().as_secs_f64() / calls as f64);
    }
    best
}

/// Times `convolve` for each engine on symmetric grids with `points` per axis
/// over `[-half_width, half_width]^dim`. The stencil follows the grid, so
/// direct cost grows with both the grid and the stencil volume. Agreement
/// with the direct engine is checked on `trials` random fields first.
pub fn benchmark(
    family: KernelFamily,
    dim: usize,
    half_width: f64,
    sizes: &[usize],
    engines: &[Engine],
    trials: usize,
    seed: u64,
) -> Result<Vec<BenchRow>> {
    if sizes.is_empty() {
        return Err(Error::Empty("no benchmark sizes given".into()));
    }
    if engines.is_empty() {
        return Err(Error::Empty("no engines selected".into()));
    }
    let mut rows = Vec::new();
    for &points in sizes {
        let grid = GridSpec::symmetric(dim, points, half_width)?;
        let kernel = make_kernel(family, dim, grid.spacing(), Some(1.0))?;
        let direct = ConvolutionPlan::new(Engine::Direct, &kernel, &grid)?;
        let mut sampler = RandomFieldSampler::new(&grid, seed);
        let fields: Vec<_> = (0..trials.max(1)).map(|_| sampler.draw()).collect();
        let references = fields
            .iter()
            .map(|u| convolve(&direct, u))
            .collect::<Result<Vec<_>>>()?;
        let u = &fields[0];
        for &engine in engines {
            let plan = direct.with_engine(engine)?;
            let mut diff = 0.0f64;
            for (u, reference) in fields.iter().zip(&references) {
                let out = convolve(&plan, u)?;
                for (a, b) in out.values().iter().zip(reference.values()) {
                    diff = diff.max((a - b).abs());
                }
            }
            if diff > AGREEMENT {
                return Err(Error::Parameter(format!(
                    "{engine} disagrees with direct by {diff:e} at {points} points"
                )));
            }
            let seconds_per_call = time_per_call(|| {
                std::hint::black_box(plan.apply_raw(u.values()));
            });
            rows.push(BenchRow {
                engine,
                points: grid.len(),
                seconds_per_call,
                max_abs_diff_vs_direct: diff,
            });
        }
    }
    Ok(rows)
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("engine,points,seconds_per_call,max_abs_diff_vs_direct\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{:e},{:e}\n",
            r.engine, r.points, r.seconds_per_call, r.max_abs_diff_vs_direct
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_size_gives_one_row_per_engine() {
        let rows = benchmark(
            KernelFamily::PolynomialBump { coefficient: 1.0 },
            1,
            4.0,
            &[65],
            &Engine::ALL,
            3,
            0,
        )
        .unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows
            .iter()
            .all(|r| r.points == 65 && r.seconds_per_call > 0.0));
        assert_eq!(rows[0].max_abs_diff_vs_direct, 0.0);
        let csv = bench_csv(&rows);
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn empty_sizes_rejected() {
        let family = KernelFamily::PolynomialBump { coefficient: 1.0 };
        assert!(benchmark(family, 1, 4.0, &[], &Engine::ALL, 1, 0).is_err());
    }
}
