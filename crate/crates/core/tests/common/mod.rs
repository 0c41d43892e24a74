//! Reference computations that share no code with the library.
#![allow(dead_code)]

use nfield::firing::FiringRate;
use nfield::grid::{Field, GridSpec};
use nfield::kernel::Kernel;

/// Five-point Gauss–Legendre nodes and weights on [-1, 1].
const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

fn gl5(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    GL5.iter().map(|(x, w)| w * f(m + r * x)).sum::<f64>() * r
}

fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let left = gl5(f, a, m);
    let right = gl5(f, m, b);
    if depth == 0 || (left + right - whole).abs() <= tol {
        return left + right;
    }
    adaptive(f, a, m, left, tol / 2.0, depth - 1) + adaptive(f, m, b, right, tol / 2.0, depth - 1)
}

/// Adaptive Gauss–Legendre quadrature of `f` over `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let f: &dyn Fn(f64) -> f64 = &f;
    adaptive(f, a, b, gl5(f, a, b), tol, 40)
}

/// Damped iteration `u ← (1 - ω) u + ω (l1 f(u) + h)` with `ω = 1/2`.
pub fn damped_fixed_point(firing: &FiringRate, l1: f64, h: f64) -> f64 {
    let mut u = h;
    for _ in 0..1_000_000 {
        let next = 0.5 * u + 0.5 * (l1 * firing.eval(u) + h);
        if next == u {
            break;
        }
        u = next;
    }
    u
}

/// `Δ^N Σ_j J(x_i - x_j) v_j` over every pair of grid points, with `J`
/// evaluated analytically.
pub fn brute_force_convolution(kernel: &Kernel, v: &Field) -> Vec<f64> {
    let grid = v.grid();
    let dim = grid.dim();
    let cell = grid.cell_volume();
    (0..grid.len())
        .map(|i| {
            let xi = grid.point(i);
            (0..grid.len())
                .map(|j| {
                    let xj = grid.point(j);
                    let d: Vec<f64> = (0..dim).map(|k| xi[k] - xj[k]).collect();
                    kernel.value_at(&d) * v.values()[j]
                })
                .sum::<f64>()
                * cell
        })
        .collect()
}

/// Plain `(Σ w |u|^p)^{1/p}` with `w = trapezoid * ρ / Σ(trapezoid * ρ)`.
pub fn weighted_norm_oracle(
    grid: &GridSpec,
    rho: impl Fn(&[f64]) -> f64,
    p: f64,
    u: &[f64],
) -> f64 {
    let dim = grid.dim();
    let mut num = 0.0;
    let mut mass = 0.0;
    for flat in 0..grid.len() {
        let idx = grid.unravel(flat);
        let x = grid.point(flat);
        let mut w = grid.cell_volume();
        for k in 0..dim {
            if idx[k] == 0 || idx[k] == grid.counts()[k] - 1 {
                w *= 0.5;
            }
        }
        let r = rho(&x[..dim]) * w;
        mass += r;
        num += r * u[flat].abs().powf(p);
    }
    (num / mass).powf(1.0 / p)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Observed order `log2(e(h) / e(h/2))`.
pub fn observed_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}
