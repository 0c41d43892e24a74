//! Firing-rate nonlinearities: bounded, nondecreasing, globally Lipschitz.
//! The sigmoid is strictly increasing and carries the inverse data the
//! Lyapunov functional needs; the saturating ramp does not.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FiringFamily {
    /// `a / (1 + e^{-β(u-θ)})`
    Sigmoid { a: f64, beta: f64, theta: f64 },
    /// `clamp(m (u - θ), 0, a)`
    SaturatingRamp { a: f64, slope: f64, theta: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiringRate {
    family: FiringFamily,
    k1: f64,
    bound_a: f64,
    strictly_increasing: bool,
}

/// `x ln x` with the removable singularity at zero filled in.
fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

impl FiringRate {
    pub fn new(family: FiringFamily) -> Result<Self> {
        let (k1, bound_a, strictly_increasing) = match family {
            FiringFamily::Sigmoid { a, beta, theta } => {
                positive("a", a)?;
                positive("beta", beta)?;
                if !theta.is_finite() {
                    return Err(Error::Parameter("theta must be finite".into()));
                }
                (a * beta / 4.0, a, true)
            }
            FiringFamily::SaturatingRamp { a, slope, theta } => {
                positive("a", a)?;
                positive("slope", slope)?;
                if !theta.is_finite() {
                    return Err(Error::Parameter("theta must be finite".into()));
                }
                (slope, a, false)
            }
        };
        Ok(Self {
            family,
            k1,
            bound_a,
            strictly_increasing,
        })
    }

    pub fn sigmoid(a: f64, beta: f64, theta: f64) -> Result<Self> {
        Self::new(FiringFamily::Sigmoid { a, beta, theta })
    }

    pub fn ramp(a: f64, slope: f64, theta: f64) -> Result<Self> {
        Self::new(FiringFamily::SaturatingRamp { a, slope, theta })
    }

    pub fn family(&self) -> FiringFamily {
        self.family
    }

    /// Upper bound `a` with `0 <= f <= a`.
    pub fn bound(&self) -> f64 {
        self.bound_a
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.strictly_increasing
    }

    pub fn eval(&self, u: f64) -> f64 {
        match self.family {
            FiringFamily::Sigmoid { a, beta, theta } => a / (1.0 + (-beta * (u - theta)).exp()),
            FiringFamily::SaturatingRamp { a, slope, theta } => (slope * (u - theta)).clamp(0.0, a),
        }
    }

    /// Global Lipschitz constant: `aβ/4` for the sigmoid, the slope for the ramp.
    pub fn lipschitz_constant(&self) -> f64 {
        self.k1
    }

    /// `f'(u)`. At ramp kinks the left limit is returned.
    pub fn derivative(&self, u: f64) -> f64 {
        match self.family {
            FiringFamily::Sigmoid { a, beta, .. } => {
                let f = self.eval(u);
                beta * f * (1.0 - f / a)
            }
            FiringFamily::SaturatingRamp { a, slope, theta } => {
                if u > theta && u <= theta + a / slope {
                    slope
                } else {
                    0.0
                }
            }
        }
    }

    fn sigmoid_params(&self) -> Result<(f64, f64, f64)> {
        match self.family {
            FiringFamily::Sigmoid { a, beta, theta } => Ok((a, beta, theta)),
            FiringFamily::SaturatingRamp { .. } => Err(Error::NotInvertible(
                "the saturating ramp is constant on its tails".into(),
            )),
        }
    }

    /// `f^{-1}(r)` for `r` strictly inside `(0, a)`.
    pub fn inverse(&self, r: f64) -> Result<f64> {
        let (a, beta, theta) = self.sigmoid_params()?;
        if !(r > 0.0 && r < a) {
            return Err(Error::Domain(format!(
                "inverse needs r in (0, {a}), got {r}"
            )));
        }
        Ok(theta + (r / (a - r)).ln() / beta)
    }

    fn inverse_antiderivative(&self, r: f64) -> Result<f64> {
        let (a, beta, theta) = self.sigmoid_params()?;
        if !(0.0..=a).contains(&r) {
            return Err(Error::Domain(format!("firing level {r} outside [0, {a}]")));
        }
        Ok(theta * r + (xlogx(r) + xlogx(a - r)) / beta)
    }

    /// `∫_{s_lo}^{s_hi} f^{-1}(r) dr` in closed form; finite on all of `[0, a]`.
    pub fn inverse_integral(&self, s_lo: f64, s_hi: f64) -> Result<f64> {
        let lo = self.inverse_antiderivative(s_lo)?;
        let hi = self.inverse_antiderivative(s_hi)?;
        if s_lo == s_hi {
            return Ok(0.0);
        }
        Ok(hi - lo)
    }

    /// `max_{0<=s<=a} |∫_0^s f^{-1}(r) dr|`, attained at `s = a` or where
    /// `f^{-1}` changes sign.
    pub fn inverse_integral_sup(&self) -> Result<f64> {
        let (a, beta, theta) = self.sigmoid_params()?;
        let turning = a / (1.0 + (beta * theta).exp());
        let at_turn = self.inverse_integral(0.0, turning)?.abs();
        let at_top = self.inverse_integral(0.0, a)?.abs();
        Ok(at_turn.max(at_top))
    }
}
