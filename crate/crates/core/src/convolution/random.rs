use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::grid::{interior_mask, Field, GridSpec, MAX_DIM};

/// Which component of the mixture produced a draw.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Bumps,
    Noise,
    Indicator,
}

/// Seeded random fields: 40% sums of Gaussian bumps, 40% white noise,
/// 20% indicators of boxes.
#[derive(Clone, Debug)]
pub struct RandomFieldSampler {
    grid: GridSpec,
    rng: ChaCha8Rng,
    support: Option<Vec<bool>>,
    amplitude: f64,
}

impl RandomFieldSampler {
    pub fn new(grid: &GridSpec, seed: u64) -> Self {
        Self {
            grid: grid.clone(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            support: None,
            amplitude: 1.0,
        }
    }

    /// Restrict draws to points at distance `>= margin` from the boundary.
    pub fn with_support_margin(mut self, margin: f64) -> Result<Self> {
        self.support = Some(interior_mask(&self.grid, margin)?);
        Ok(self)
    }

    /// Multiply every draw by `amplitude`.
    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn draw(&mut self) -> Field {
        self.draw_with_kind().0
    }

    pub fn draw_with_kind(&mut self) -> (Field, FieldKind) {
        let roll: f64 = self.rng.gen();
        let kind = if roll < 0.4 {
            FieldKind::Bumps
        } else if roll < 0.8 {
            FieldKind::Noise
        } else {
            FieldKind::Indicator
        };
        let mut values = match kind {
            FieldKind::Bumps => self.bumps(),
            FieldKind::Noise => (0..self.grid.len())
                .map(|_| self.rng.gen_range(-1.0..=1.0))
                .collect(),
            FieldKind::Indicator => self.indicator(),
        };
        if let Some(mask) = &self.support {
            for (v, &m) in values.iter_mut().zip(mask) {
                if !m {
                    *v = 0.0;
                }
            }
        }
        for v in &mut values {
            *v *= self.amplitude;
        }
        (Field::from_parts(self.grid.clone(), values), kind)
    }

    fn random_point(&mut self) -> [f64; MAX_DIM] {
        let mut c = [0.0; MAX_DIM];
        for (axis, slot) in c.iter_mut().enumerate().take(self.grid.dim()) {
            let lo = self.grid.coordinate(axis, 0);
            *slot = self.rng.gen_range(lo..=self.grid.upper(axis));
        }
        c
    }

    fn bumps(&mut self) -> Vec<f64> {
        let dim = self.grid.dim();
        let count = self.rng.gen_range(1..=4);
        let bumps: Vec<([f64; MAX_DIM], f64, f64)> = (0..count)
            .map(|_| {
                let c = self.random_point();
                let width = self.rng.gen_range(0.1..2.0);
                let amp = self.rng.gen_range(-2.0..2.0);
                (c, width, amp)
            })
            .collect();
        self.grid.sample(|x| {
            bumps
                .iter()
                .map(|(c, w, a)| {
                    let r2: f64 = (0..dim).map(|k| (x[k] - c[k]).powi(2)).sum();
                    a * (-r2 / (2.0 * w * w)).exp()
                })
                .sum()
        })
    }

    fn indicator(&mut self) -> Vec<f64> {
        let dim = self.grid.dim();
        let c = self.random_point();
        let mut half = [0.0; MAX_DIM];
        for h in half.iter_mut().take(dim) {
            *h = self.rng.gen_range(0.2..3.0);
        }
        let sign = if self.rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let level = sign * self.rng.gen_range(0.5..2.0);
        self.grid.sample(|x| {
            if (0..dim).all(|k| (x[k] - c[k]).abs() <= half[k]) {
                level
            } else {
                0.0
            }
        })
    }
}
