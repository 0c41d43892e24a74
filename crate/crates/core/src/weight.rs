//! Admissible weight functions ρ and the weighted L^p norms built on them.
//!
//! A weight must be positive, even, integrate to one, and satisfy the
//! unit-ball domination bound `sup_{|x-y|<=1} ρ(x) <= K ρ(y)`. Both shipped
//! families carry an analytic `K`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{interior_mask, Field, GridSpec};

/// Relative slack allowed when comparing an observed domination ratio to `K`.
pub const H2_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightFamily {
    /// `ρ(x) = c e^{-λ|x|}`, `K = e^λ`.
    Exponential { rate: f64 },
    /// `ρ(x) = c (1 + |x|)^{-q}` with `q > N`, `K = 2^q`.
    PolynomialDecay { exponent: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    family: WeightFamily,
    dim: usize,
    normalization: f64,
    k: f64,
}

/// Surface area of the unit sphere in R^N.
fn sphere_area(dim: usize) -> f64 {
    use std::f64::consts::PI;
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => unreachable!("dimension checked by caller"),
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Builds a weight with closed-form normalization and domination constant.
pub fn make_weight(family: WeightFamily, dim: usize) -> Result<Weight> {
    if !(1..=3).contains(&dim) {
        return Err(Error::Parameter(format!(
            "dimension must be 1..=3, got {dim}"
        )));
    }
    let (mass, k) = match family {
        WeightFamily::Exponential { rate } => {
            if !(rate > 0.0 && rate.is_finite()) {
                return Err(Error::Parameter(format!(
                    "rate must be positive, got {rate}"
                )));
            }
            // ∫ e^{-λr} r^{N-1} dr = (N-1)! / λ^N
            (
                sphere_area(dim) * factorial(dim - 1) / rate.powi(dim as i32),
                rate.exp(),
            )
        }
        WeightFamily::PolynomialDecay { exponent } => {
            if !exponent.is_finite() || exponent <= dim as f64 {
                return Err(Error::NonIntegrable(format!(
                    "(1+|x|)^-q needs q > {dim}, got q = {exponent}"
                )));
            }
            // ∫ (1+r)^{-q} r^{N-1} dr = B(N, q-N) = (N-1)! / ∏_{k=1}^{N} (q-k)
            let beta = factorial(dim - 1) / (1..=dim).map(|k| exponent - k as f64).product::<f64>();
            (sphere_area(dim) * beta, 2f64.powf(exponent))
        }
    };
    Ok(Weight {
        family,
        dim,
        normalization: 1.0 / mass,
        k,
    })
}

impl Weight {
    pub fn family(&self) -> WeightFamily {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The constant `c` making `∫ρ = 1` over R^N.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// The domination constant `K`.
    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.normalization
            * match self.family {
                WeightFamily::Exponential { rate } => (-rate * r).exp(),
                WeightFamily::PolynomialDecay { exponent } => (1.0 + r).powf(-exponent),
            }
    }

    pub fn sample(&self, grid: &GridSpec) -> Result<Vec<f64>> {
        if grid.dim() != self.dim {
            return Err(Error::Shape(format!(
                "weight is {}-dimensional, grid is {}-dimensional",
                self.dim,
                grid.dim()
            )));
        }
        Ok(grid.sample(|x| self.eval(x)))
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct H2Report {
    pub k_observed: f64,
    pub k_claimed: f64,
    pub pass: bool,
}

/// Offsets (in grid cells) of all grid points within distance 1 of the origin.
pub(crate) fn unit_ball_offsets(grid: &GridSpec) -> Vec<[isize; 3]> {
    let dim = grid.dim();
    let reach: Vec<isize> = grid
        .spacing()
        .iter()
        .map(|dx| (1.0 / dx).floor() as isize)
        .collect();
    let mut out = Vec::new();
    let r0 = if dim > 0 { reach[0] } else { 0 };
    let r1 = if dim > 1 { reach[1] } else { 0 };
    let r2 = if dim > 2 { reach[2] } else { 0 };
    for a in -r0..=r0 {
        for b in -r1..=r1 {
            for c in -r2..=r2 {
                let off = [a, b, c];
                let d2: f64 = (0..dim)
                    .map(|i| {
                        let d = off[i] as f64 * grid.spacing()[i];
                        d * d
                    })
                    .sum();
                if d2 <= 1.0 + 1e-12 {
                    out.push(off);
                }
            }
        }
    }
    out
}

/// Largest sampled ratio `ρ(x)/ρ(y)` over interior grid points `y` (margin 1)
/// and grid points `x` with `|x - y| <= 1`.
pub fn sampled_h2_ratio(grid: &GridSpec, samples: &[f64]) -> Result<f64> {
    if samples.len() != grid.len() {
        return Err(Error::Shape("weight samples do not match grid".into()));
    }
    if let Some(k) = samples.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::Parameter(format!(
            "weight must be positive and finite, sample {k} is {}",
            samples[k]
        )));
    }
    let mask = interior_mask(grid, 1.0)?;
    let offsets = unit_ball_offsets(grid);
    let strides = grid.strides();
    let dim = grid.dim();
    let ratio = (0..grid.len())
        .into_par_iter()
        .filter(|&y| mask[y])
        .map(|y| {
            let idx = grid.unravel(y);
            let base = samples[y];
            offsets
                .iter()
                .map(|off| {
                    let mut flat = 0isize;
                    for i in 0..dim {
                        flat += (idx[i] as isize + off[i]) * strides[i] as isize;
                    }
                    samples[flat as usize] / base
                })
                .fold(0.0f64, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(ratio)
}

/// Checks arbitrary positive samples against a claimed domination constant.
pub fn verify_h2_samples(grid: &GridSpec, samples: &[f64], k_claimed: f64) -> Result<H2Report> {
    let k_observed = sampled_h2_ratio(grid, samples)?;
    Ok(H2Report {
        k_observed,
        k_claimed,
        pass: k_observed <= k_claimed * (1.0 + H2_SLACK),
    })
}

pub fn verify_h2(weight: &Weight, grid: &GridSpec) -> Result<H2Report> {
    verify_h2_samples(grid, &weight.sample(grid)?, weight.k())
}

/// A weighted L^p norm bound to one grid.
///
/// The sampled weight is restricted to the box and rescaled to unit discrete
/// mass, so constants have norm exactly one on the grid. Ratios of samples,
/// and therefore `K`, are unaffected by the rescaling.
#[derive(Clone, Debug)]
pub struct WeightedLp {
    grid: GridSpec,
    p: f64,
    k: f64,
    mass_on_grid: f64,
    quad: Vec<f64>,
}

impl WeightedLp {
    pub fn new(weight: &Weight, grid: &GridSpec, p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::Parameter(format!("p must lie in (1, inf), got {p}")));
        }
        let rho = weight.sample(grid)?;
        let tw = grid.trapezoid_weights();
        let mass_on_grid: f64 = rho.iter().zip(&tw).map(|(r, q)| r * q).sum();
        if !(mass_on_grid > 0.0) {
            return Err(Error::NonIntegrable(
                "weight has no mass on the grid".into(),
            ));
        }
        let quad = rho
            .iter()
            .zip(&tw)
            .map(|(r, q)| r * q / mass_on_grid)
            .collect();
        Ok(Self {
            grid: grid.clone(),
            p,
            k: weight.k(),
            mass_on_grid,
            quad,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Trapezoid mass of the closed-form weight on the grid, before rescaling.
    pub fn mass_on_grid(&self) -> f64 {
        self.mass_on_grid
    }

    /// Per-point quadrature weights (trapezoid times rescaled ρ).
    pub fn quadrature_weights(&self) -> &[f64] {
        &self.quad
    }

    pub fn norm(&self, u: &Field) -> Result<f64> {
        self.grid.check_same(u.grid())?;
        Ok(self.norm_of(u.values()))
    }

    pub fn norm_masked(&self, u: &Field, mask: &[bool]) -> Result<f64> {
        self.grid.check_same(u.grid())?;
        if mask.len() != u.len() {
            return Err(Error::Shape("mask length differs from field".into()));
        }
        let sum: f64 = u
            .values()
            .iter()
            .zip(&self.quad)
            .zip(mask)
            .filter(|(_, &m)| m)
            .map(|((v, w), _)| v.abs().powf(self.p) * w)
            .sum();
        Ok(sum.powf(1.0 / self.p))
    }

    pub fn distance(&self, a: &Field, b: &Field) -> Result<f64> {
        self.grid.check_same(a.grid())?;
        self.grid.check_same(b.grid())?;
        let sum: f64 = a
            .values()
            .iter()
            .zip(b.values())
            .zip(&self.quad)
            .map(|((x, y), w)| (x - y).abs().powf(self.p) * w)
            .sum();
        Ok(sum.powf(1.0 / self.p))
    }

    /// Norm of raw values assumed to live on this grid.
    pub(crate) fn norm_of(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.quad.len());
        let pairs = values.iter().zip(&self.quad);
        if self.p == 2.0 {
            return pairs.map(|(v, w)| v * v * w).sum::<f64>().sqrt();
        }
        let sum: f64 = pairs.map(|(v, w)| v.abs().powf(self.p) * w).sum();
        sum.powf(1.0 / self.p)
    }
}

/// `(∫ |u|^p ρ)^{1/p}` on the field's grid.
pub fn weighted_lp_norm(field: &Field, weight: &Weight, p: f64) -> Result<f64> {
    WeightedLp::new(weight, field.grid(), p)?.norm(field)
}
