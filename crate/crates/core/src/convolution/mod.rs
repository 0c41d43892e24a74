//! The spatial operator `J∗v` with zero extension off the box.
//!
//! Two engines consume the same sampled stencil: a direct sum, which is the
//! reference, and a zero-padded FFT product for large grids.

mod bench;
mod direct;
mod fourier;
mod random;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};
use crate::kernel::Kernel;
use crate::weight::{Weight, WeightedLp};

pub use bench::{bench_csv, benchmark, BenchRow};
pub use random::{FieldKind, RandomFieldSampler};

use direct::DirectEngine;
use fourier::FourierEngine;

/// Relative slack on the weighted convolution bound.
pub const CONVOLUTION_BOUND_SLACK: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Engine {
    Direct,
    Fourier,
}

impl Engine {
    pub const ALL: [Engine; 2] = [Engine::Direct, Engine::Fourier];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Direct => "direct",
            Engine::Fourier => "fourier",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "direct" => Ok(Engine::Direct),
            "fourier" | "fft" => Ok(Engine::Fourier),
            other => Err(Error::Parameter(format!("unknown engine `{other}`"))),
        }
    }
}

#[derive(Clone, Debug)]
enum Backend {
    Direct(DirectEngine),
    Fourier(FourierEngine),
}

/// A kernel bound to a grid and an engine. Immutable once built.
#[derive(Clone, Debug)]
pub struct ConvolutionPlan {
    engine: Engine,
    kernel: Kernel,
    grid: GridSpec,
    backend: Backend,
    gradients: Vec<DirectEngine>,
}

fn spacing_matches(kernel: &Kernel, grid: &GridSpec) -> bool {
    kernel
        .spacing()
        .iter()
        .zip(grid.spacing())
        .all(|(a, b)| (a - b).abs() <= 1e-12 * b.abs())
}

impl ConvolutionPlan {
    pub fn new(engine: Engine, kernel: &Kernel, grid: &GridSpec) -> Result<Self> {
        if kernel.dim() != grid.dim() || !spacing_matches(kernel, grid) {
            return Err(Error::Shape(format!(
                "kernel stencil (dim {}, spacing {:?}) does not match grid (dim {}, spacing {:?})",
                kernel.dim(),
                kernel.spacing(),
                grid.dim(),
                grid.spacing()
            )));
        }
        let scale = grid.cell_volume();
        let backend = match engine {
            Engine::Direct => {
                Backend::Direct(DirectEngine::new(kernel.samples(), kernel.radius(), scale))
            }
            Engine::Fourier => Backend::Fourier(FourierEngine::new(
                grid,
                kernel.samples(),
                kernel.radius(),
                scale,
            )),
        };
        let gradients = (0..grid.dim())
            .map(|axis| {
                let g = kernel.gradient_samples(axis)?;
                Ok(DirectEngine::new(&g, kernel.radius(), scale))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            engine,
            kernel: kernel.clone(),
            grid: grid.clone(),
            backend,
            gradients,
        })
    }

    pub fn engine(&self) -> Engine {
        self.engine
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// The same kernel and grid on another engine.
    pub fn with_engine(&self, engine: Engine) -> Result<Self> {
        Self::new(engine, &self.kernel, &self.grid)
    }

    pub(crate) fn apply_raw(&self, values: &[f64]) -> Vec<f64> {
        match &self.backend {
            Backend::Direct(d) => d.apply(&self.grid, values),
            Backend::Fourier(f) => f.apply(&self.grid, values),
        }
    }
}

/// `(J∗v)(x_i) = Δ^N Σ_j J(x_i - x_j) v_j`, with `v = 0` off the box.
pub fn convolve(plan: &ConvolutionPlan, v: &Field) -> Result<Field> {
    plan.grid.check_same(v.grid())?;
    Ok(Field::from_parts(
        plan.grid.clone(),
        plan.apply_raw(v.values()),
    ))
}

/// `(∂_axis J)∗v` by direct summation over the differentiated stencil.
pub fn convolve_gradient(plan: &ConvolutionPlan, v: &Field, axis: usize) -> Result<Field> {
    plan.grid.check_same(v.grid())?;
    let engine = plan
        .gradients
        .get(axis)
        .ok_or_else(|| Error::Parameter(format!("axis {axis} out of range")))?;
    Ok(Field::from_parts(
        plan.grid.clone(),
        engine.apply(&plan.grid, v.values()),
    ))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConvolutionBoundReport {
    pub p: f64,
    pub k: f64,
    pub trials: usize,
    pub max_ratio: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Monte-Carlo check of `‖J∗u‖ <= K^{1/p} ‖J‖₁ ‖u‖` for one weight and `p`.
pub fn certify_convolution_bound(
    plan: &ConvolutionPlan,
    weight: &Weight,
    p: f64,
    trials: usize,
    seed: u64,
) -> Result<ConvolutionBoundReport> {
    let norm = WeightedLp::new(weight, &plan.grid, p)?;
    Ok(convolution_bound_sweep(plan, &[norm], trials, seed)?[0])
}

/// [`certify_convolution_bound`] for several norms, convolving each random field once.
///
/// Fields are drawn with support at distance at least one from the boundary,
/// so every shifted copy `u(· - y)`, `|y| <= 1`, stays inside the box and the
/// discrete estimate holds without truncation effects.
pub fn convolution_bound_sweep(
    plan: &ConvolutionPlan,
    norms: &[WeightedLp],
    trials: usize,
    seed: u64,
) -> Result<Vec<ConvolutionBoundReport>> {
    if trials == 0 {
        return Err(Error::Parameter("trials must be at least 1".into()));
    }
    for n in norms {
        plan.grid.check_same(n.grid())?;
    }
    let mut sampler = RandomFieldSampler::new(&plan.grid, seed).with_support_margin(1.0)?;
    let mut max_ratio = vec![0.0f64; norms.len()];
    let mut accepted = 0;
    while accepted < trials {
        let u = sampler.draw();
        if u.values().iter().all(|&v| v == 0.0) {
            continue;
        }
        let ju = plan.apply_raw(u.values());
        for (m, n) in max_ratio.iter_mut().zip(norms) {
            let denom = n.norm_of(u.values());
            *m = m.max(n.norm_of(&ju) / denom);
        }
        accepted += 1;
    }
    let l1 = plan.kernel.l1_norm();
    Ok(norms
        .iter()
        .zip(max_ratio)
        .map(|(n, max_ratio)| {
            let bound = n.k().powf(1.0 / n.p()) * l1;
            ConvolutionBoundReport {
                p: n.p(),
                k: n.k(),
                trials,
                max_ratio,
                bound,
                pass: max_ratio <= bound * (1.0 + CONVOLUTION_BOUND_SLACK),
            }
        })
        .collect())
}
