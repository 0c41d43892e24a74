use rayon::prelude::*;

use crate::grid::{GridSpec, MAX_DIM};

/// One run of consecutive nonzero stencil entries along the last axis.
#[derive(Clone, Debug)]
struct StencilRow {
    outer: [isize; MAX_DIM],
    start: isize,
    values: Vec<f64>,
}

/// Direct summation `out[i] = Σ_o w[o] v[i - o]` with zero extension.
#[derive(Clone, Debug)]
pub(crate) struct DirectEngine {
    rows: Vec<StencilRow>,
    scale: f64,
}

impl DirectEngine {
    /// `samples` is a row-major stencil with half-widths `radius`;
    /// `scale` multiplies every output (the cell volume).
    pub(crate) fn new(samples: &[f64], radius: &[usize], scale: f64) -> Self {
        let dim = radius.len();
        let counts: Vec<usize> = radius.iter().map(|r| 2 * r + 1).collect();
        let last = counts[dim - 1];
        let mut rows = Vec::new();
        for (row_idx, row) in samples.chunks(last).enumerate() {
            let Some(first) = row.iter().position(|&v| v != 0.0) else {
                continue;
            };
            let end = row.iter().rposition(|&v| v != 0.0).unwrap() + 1;
            let mut outer = [0isize; MAX_DIM];
            let mut rem = row_idx;
            for axis in (0..dim - 1).rev() {
                outer[axis] = (rem % counts[axis]) as isize - radius[axis] as isize;
                rem /= counts[axis];
            }
            rows.push(StencilRow {
                outer,
                start: first as isize - radius[dim - 1] as isize,
                values: row[first..end].to_vec(),
            });
        }
        Self { rows, scale }
    }

    pub(crate) fn apply(&self, grid: &GridSpec, input: &[f64]) -> Vec<f64> {
        let dim = grid.dim();
        let counts = grid.counts();
        let strides = grid.strides();
        let n_last = counts[dim - 1] as isize;
        let mut out = vec![0.0; input.len()];
        out.par_chunks_mut(counts[dim - 1])
            .enumerate()
            .for_each(|(line, out_line)| {
                let idx = grid.unravel(line * counts[dim - 1]);
                for row in &self.rows {
                    let mut base = 0isize;
                    let mut inside = true;
                    for axis in 0..dim - 1 {
                        let j = idx[axis] as isize - row.outer[axis];
                        if j < 0 || j >= counts[axis] as isize {
                            inside = false;
                            break;
                        }
                        base += j * strides[axis] as isize;
                    }
                    if !inside {
                        continue;
                    }
                    let src = &input[base as usize..base as usize + n_last as usize];
                    let len = row.values.len() as isize;
                    for (i, o) in out_line.iter_mut().enumerate() {
                        let i = i as isize;
                        // source index i - (start + t) must lie in [0, n_last)
                        let t_lo = (i - row.start - n_last + 1).max(0);
                        let t_hi = (i - row.start + 1).min(len);
                        let mut acc = 0.0;
                        for t in t_lo..t_hi {
                            acc += row.values[t as usize] * src[(i - row.start - t) as usize];
                        }
                        *o += acc;
                    }
                }
                for o in out_line.iter_mut() {
                    *o *= self.scale;
                }
            });
        out
    }
}
