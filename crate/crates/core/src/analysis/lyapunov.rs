use serde::Serialize;

use crate::dynamics::{homogeneous_equilibrium, ModelParams};
use crate::error::{Error, Result};
use crate::grid::Field;

/// Data for the energy relative to the resting level `u0`:
///
/// `G(u) = Δ^N Σ_i [ -½ φ_i (J∗φ)_i + ∫_{f(u0)}^{f(u_i)} f^{-1} - c_i φ_i ]`
///
/// with `φ = f(u) - f(u0)` and `c = h + f(u0) (J∗1)`. Away from the boundary
/// `c = u0`, so the last two terms combine to `∫_{f(u0)}^{f(u)} (f^{-1}(r) - u0) dr`.
/// Lattice weights make the semi-discrete identity
/// `dG/dt = -Δ^N Σ f'(u) (u_t)^2` exact.
#[derive(Clone, Debug)]
pub(crate) struct LyapunovContext {
    f_u0: f64,
    j_one: Vec<f64>,
    cell: f64,
}

fn require_invertible(params: &ModelParams) -> Result<()> {
    if params.firing().is_strictly_increasing() {
        Ok(())
    } else {
        Err(Error::NotInvertible(
            "the energy needs a strictly increasing firing rate".into(),
        ))
    }
}

impl LyapunovContext {
    pub(crate) fn new(params: &ModelParams) -> Result<Self> {
        let eq = homogeneous_equilibrium(params.firing(), params.l1_norm(), params.h())?;
        Self::with_resting_level(params, eq.u0)
    }

    pub(crate) fn with_resting_level(params: &ModelParams, u0: f64) -> Result<Self> {
        require_invertible(params)?;
        if !u0.is_finite() {
            return Err(Error::NonFinite("resting level".into()));
        }
        let ones = vec![1.0; params.grid().len()];
        Ok(Self {
            f_u0: params.firing().eval(u0),
            j_one: params.plan().apply_raw(&ones),
            cell: params.grid().cell_volume(),
        })
    }

    /// `(G, dG/dt)` from the state, `f(u)` and `J∗f(u)`.
    pub(crate) fn evaluate(
        &self,
        params: &ModelParams,
        u: &[f64],
        fu: &[f64],
        jfu: &[f64],
    ) -> Result<(f64, f64)> {
        let firing = params.firing();
        let h = params.h();
        let mut g = 0.0;
        let mut rate = 0.0;
        for i in 0..u.len() {
            let phi = fu[i] - self.f_u0;
            let j_phi = jfu[i] - self.f_u0 * self.j_one[i];
            let c = h + self.f_u0 * self.j_one[i];
            g += -0.5 * phi * j_phi + firing.inverse_integral(self.f_u0, fu[i])? - c * phi;
            let r = -u[i] + jfu[i] + h;
            rate -= firing.derivative(u[i]) * r * r;
        }
        Ok((g * self.cell, rate * self.cell))
    }
}

/// The energy of `u` relative to the resting level `u0`.
pub fn lyapunov_g(u: &Field, params: &ModelParams, u0: f64) -> Result<f64> {
    params.grid().check_same(u.grid())?;
    let ctx = LyapunovContext::with_resting_level(params, u0)?;
    let fu = params.firing_values(u.values());
    let jfu = params.plan().apply_raw(&fu);
    Ok(ctx.evaluate(params, u.values(), &fu, &jfu)?.0)
}

/// `-Δ^N Σ f'(u) F(u)^2`, never positive.
pub fn lyapunov_rate(u: &Field, params: &ModelParams) -> Result<f64> {
    params.grid().check_same(u.grid())?;
    require_invertible(params)?;
    let fu = params.firing_values(u.values());
    let jfu = params.plan().apply_raw(&fu);
    let firing = params.firing();
    let sum: f64 = u
        .values()
        .iter()
        .zip(&jfu)
        .map(|(&u, &j)| {
            let r = -u + j + params.h();
            firing.derivative(u) * r * r
        })
        .sum();
    Ok(-sum * params.grid().cell_volume())
}

#[derive(Clone, Debug, Serialize)]
pub struct H6Report {
    pub fractions: Vec<f64>,
    pub tail_masses: Vec<f64>,
    pub converged: bool,
}

/// `∫ |f(u) - f(u0)|` over nested centred sub-boxes covering the given
/// fractions of the half-width. Converged when the last two masses differ by
/// less than `1e-6` relative.
pub fn check_h6(u: &Field, params: &ModelParams, u0: f64, fractions: &[f64]) -> Result<H6Report> {
    params.grid().check_same(u.grid())?;
    if fractions.is_empty() {
        return Err(Error::Empty("no box fractions given".into()));
    }
    if fractions.iter().any(|&s| !(s > 0.0 && s <= 1.0))
        || fractions.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::Parameter(
            "box fractions must increase within (0, 1]".into(),
        ));
    }
    let grid = params.grid();
    let dim = grid.dim();
    let f_u0 = params.firing().eval(u0);
    let excess: Vec<f64> = u
        .values()
        .iter()
        .map(|&v| (params.firing().eval(v) - f_u0).abs())
        .collect();
    let cell = grid.cell_volume();
    let tail_masses: Vec<f64> = fractions
        .iter()
        .map(|&s| {
            let sum: f64 = (0..grid.len())
                .filter(|&flat| {
                    let x = grid.point(flat);
                    (0..dim).all(|k| {
                        (x[k] - grid.center(k)).abs()
                            <= s * grid.extent_half_width(k) + 1e-9 * grid.spacing()[k]
                    })
                })
                .map(|flat| excess[flat])
                .sum();
            sum * cell
        })
        .collect();
    let converged = match tail_masses.as_slice() {
        [.., a, b] => (b - a).abs() <= 1e-6 * b.abs(),
        [only] => *only == 0.0,
        [] => unreachable!(),
    };
    Ok(H6Report {
        fractions: fractions.to_vec(),
        tail_masses,
        converged,
    })
}
