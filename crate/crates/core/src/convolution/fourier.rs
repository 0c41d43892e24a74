use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::GridSpec;

/// Smallest `n >= min` whose prime factors are all in {2, 3, 5, 7}.
pub(crate) fn fast_len(min: usize) -> usize {
    let mut n = min.max(1);
    loop {
        let mut m = n;
        for p in [2, 3, 5, 7] {
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        if m == 1 {
            return n;
        }
        n += 1;
    }
}

/// Linear convolution by zero padding to at least `grid + stencil - 1`
/// points per axis, so the circular product never wraps onto the output.
#[derive(Clone)]
pub(crate) struct FourierEngine {
    padded: Vec<usize>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
    kernel_hat: Vec<Complex64>,
}

impl std::fmt::Debug for FourierEngine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierEngine")
            .field("padded", &self.padded)
            .finish()
    }
}

fn padded_strides(padded: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; padded.len()];
    for axis in (0..padded.len().saturating_sub(1)).rev() {
        strides[axis] = strides[axis + 1] * padded[axis + 1];
    }
    strides
}

impl FourierEngine {
    pub(crate) fn new(grid: &GridSpec, samples: &[f64], radius: &[usize], scale: f64) -> Self {
        let dim = grid.dim();
        let padded: Vec<usize> = (0..dim)
            .map(|axis| fast_len(grid.counts()[axis] + 2 * radius[axis]))
            .collect();
        let mut planner = FftPlanner::new();
        let forward = padded
            .iter()
            .map(|&n| planner.plan_fft_forward(n))
            .collect();
        let inverse = padded
            .iter()
            .map(|&n| planner.plan_fft_inverse(n))
            .collect();
        let total: usize = padded.iter().product();
        let strides = padded_strides(&padded);

        // kernel offset o sits at index o mod P on each axis
        let counts: Vec<usize> = radius.iter().map(|r| 2 * r + 1).collect();
        let mut kernel = vec![Complex64::new(0.0, 0.0); total];
        for (flat, &v) in samples.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let mut rem = flat;
            let mut pos = 0;
            for axis in (0..dim).rev() {
                let o = (rem % counts[axis]) as isize - radius[axis] as isize;
                rem /= counts[axis];
                pos += o.rem_euclid(padded[axis] as isize) as usize * strides[axis];
            }
            // fold the normalization of the inverse transform into the kernel
            kernel[pos] = Complex64::new(v * scale / total as f64, 0.0);
        }
        let mut engine = Self {
            padded,
            forward,
            inverse,
            kernel_hat: Vec::new(),
        };
        engine.transform(&mut kernel, false);
        engine.kernel_hat = kernel;
        engine
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let dim = self.padded.len();
        let strides = padded_strides(&self.padded);
        for axis in 0..dim {
            let fft = if inverse {
                &self.inverse[axis]
            } else {
                &self.forward[axis]
            };
            let n = self.padded[axis];
            if axis == dim - 1 {
                data.par_chunks_mut(n).for_each(|line| fft.process(line));
                continue;
            }
            let stride = strides[axis];
            let block = n * stride;
            // lines along `axis` start at every index whose axis coordinate is 0
            let starts: Vec<usize> = (0..data.len()).filter(|&i| (i % block) < stride).collect();
            let lines: Vec<Vec<Complex64>> = starts
                .par_iter()
                .map(|&s| {
                    let mut line: Vec<Complex64> = (0..n).map(|k| data[s + k * stride]).collect();
                    fft.process(&mut line);
                    line
                })
                .collect();
            for (&s, line) in starts.iter().zip(&lines) {
                for (k, v) in line.iter().enumerate() {
                    data[s + k * stride] = *v;
                }
            }
        }
    }

    pub(crate) fn apply(&self, grid: &GridSpec, input: &[f64]) -> Vec<f64> {
        let dim = grid.dim();
        let total: usize = self.padded.iter().product();
        let pstrides = padded_strides(&self.padded);
        let mut data = vec![Complex64::new(0.0, 0.0); total];
        for (flat, &v) in input.iter().enumerate() {
            let idx = grid.unravel(flat);
            let pos: usize = (0..dim).map(|a| idx[a] * pstrides[a]).sum();
            data[pos] = Complex64::new(v, 0.0);
        }
        self.transform(&mut data, false);
        data.par_iter_mut()
            .zip(self.kernel_hat.par_iter())
            .for_each(|(d, k)| *d *= k);
        self.transform(&mut data, true);
        (0..input.len())
            .map(|flat| {
                let idx = grid.unravel(flat);
                let pos: usize = (0..dim).map(|a| idx[a] * pstrides[a]).sum();
                data[pos].re
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_len_picks_smooth_sizes() {
        assert_eq!(fast_len(289), 294);
        assert_eq!(fast_len(256), 256);
        assert_eq!(fast_len(11), 12);
        assert_eq!(fast_len(1), 1);
    }
}
