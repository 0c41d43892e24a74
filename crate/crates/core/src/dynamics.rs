//! `u_t = -u + J∗f(u) + h`: right-hand side, integrators, simulation and the
//! spatially homogeneous equilibrium.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::analysis::lyapunov::LyapunovContext;
use crate::convolution::{ConvolutionPlan, RandomFieldSampler};
use crate::error::{Error, Result};
use crate::firing::FiringRate;
use crate::grid::{Field, GridSpec};
use crate::kernel::Kernel;
use crate::weight::WeightedLp;

/// Largest admissible time step.
pub const DT_CAP: f64 = 0.1;
/// Relative slack for the Monte-Carlo Lipschitz bound.
pub const LIPSCHITZ_SLACK: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct ModelParams {
    firing: FiringRate,
    h: f64,
    plan: ConvolutionPlan,
}

impl ModelParams {
    pub fn new(plan: ConvolutionPlan, firing: FiringRate, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Parameter(format!(
                "stimulus must satisfy h > 0, got {h}"
            )));
        }
        Ok(Self { firing, h, plan })
    }

    pub fn kernel(&self) -> &Kernel {
        self.plan.kernel()
    }

    pub fn firing(&self) -> &FiringRate {
        &self.firing
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn plan(&self) -> &ConvolutionPlan {
        &self.plan
    }

    pub fn grid(&self) -> &GridSpec {
        self.plan.grid()
    }

    /// Discrete `‖J‖₁`.
    pub fn l1_norm(&self) -> f64 {
        self.kernel().l1_norm()
    }

    /// `a ‖J‖₁ + h`, the sup-norm radius that traps every solution.
    pub fn linf_radius(&self) -> f64 {
        self.firing.bound() * self.l1_norm() + self.h
    }

    /// `a K^{1/p} ‖J‖₁ + h` for the given norm.
    pub fn absorbing_radius(&self, norm: &WeightedLp) -> f64 {
        self.firing.bound() * norm.k().powf(1.0 / norm.p()) * self.l1_norm() + self.h
    }

    /// Same firing rate and stimulus with a different kernel on the same grid.
    pub fn with_kernel(&self, kernel: &Kernel) -> Result<Self> {
        let plan = ConvolutionPlan::new(self.plan.engine(), kernel, self.grid())?;
        Self::new(plan, self.firing, self.h)
    }

    pub(crate) fn firing_values(&self, u: &[f64]) -> Vec<f64> {
        u.iter().map(|&v| self.firing.eval(v)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Integrator {
    ExponentialEuler,
    Rk4,
}

impl Integrator {
    pub fn name(self) -> &'static str {
        match self {
            Integrator::ExponentialEuler => "exponential_euler",
            Integrator::Rk4 => "rk4",
        }
    }
}

impl fmt::Display for Integrator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Integrator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exponential_euler" | "expeuler" => Ok(Integrator::ExponentialEuler),
            "rk4" => Ok(Integrator::Rk4),
            other => Err(Error::Parameter(format!("unknown integrator `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub t_end: f64,
    pub integrator: Integrator,
    pub record_every: usize,
    pub seed: u64,
    /// Keep every recorded state; otherwise only the final one is stored.
    pub keep_snapshots: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 10.0,
            integrator: Integrator::ExponentialEuler,
            record_every: 10,
            seed: 0,
            keep_snapshots: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= DT_CAP) {
            return Err(Error::Parameter(format!(
                "dt must lie in (0, {DT_CAP}], got {}",
                self.dt
            )));
        }
        if !(self.t_end == 0.0 || self.t_end >= self.dt) || !self.t_end.is_finite() {
            return Err(Error::Parameter(format!(
                "t_end must be 0 or at least dt, got {}",
                self.t_end
            )));
        }
        if self.record_every == 0 {
            return Err(Error::Parameter("record_every must be at least 1".into()));
        }
        Ok(())
    }

    /// `round(t_end / dt)`; times are `k * dt`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DiagnosticsSeries {
    pub t: Vec<f64>,
    pub lp_norm: Vec<f64>,
    pub sup_norm: Vec<f64>,
    /// Present when the firing rate is strictly increasing.
    pub lyapunov_g: Option<Vec<f64>>,
    pub dg_dt: Option<Vec<f64>>,
}

impl DiagnosticsSeries {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Columns `t, lp_norm, sup_norm, lyapunov_G, dG_dt`; the last two are
    /// empty cells when unavailable.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,lp_norm,sup_norm,lyapunov_G,dG_dt\n");
        for k in 0..self.len() {
            let g = self.lyapunov_g.as_ref().map(|g| format!("{:e}", g[k]));
            let r = self.dg_dt.as_ref().map(|r| format!("{:e}", r[k]));
            out.push_str(&format!(
                "{},{:e},{:e},{},{}\n",
                self.t[k],
                self.lp_norm[k],
                self.sup_norm[k],
                g.unwrap_or_default(),
                r.unwrap_or_default()
            ));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    /// Integrator step used to produce the run.
    pub dt: f64,
    pub times: Vec<f64>,
    /// One state per recorded time, or only the final state when snapshots
    /// were not kept.
    pub snapshots: Vec<Field>,
    pub diagnostics: DiagnosticsSeries,
}

impl Trajectory {
    pub fn final_state(&self) -> &Field {
        self.snapshots
            .last()
            .expect("a trajectory always holds a state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("a trajectory always holds a time")
    }
}

/// `-u + J∗f(u) + h` from precomputed `J∗f(u)`.
fn assemble_rhs(u: &[f64], jfu: &[f64], h: f64) -> Vec<f64> {
    u.iter().zip(jfu).map(|(u, j)| -u + j + h).collect()
}

pub fn rhs(params: &ModelParams, u: &Field) -> Result<Field> {
    params.grid().check_same(u.grid())?;
    let jfu = params.plan.apply_raw(&params.firing_values(u.values()));
    Ok(Field::from_parts(
        params.grid().clone(),
        assemble_rhs(u.values(), &jfu, params.h),
    ))
}

fn exp_euler_values(u: &[f64], jfu: &[f64], h: f64, dt: f64) -> Vec<f64> {
    let decay = (-dt).exp();
    let gain = -(-dt).exp_m1();
    u.iter()
        .zip(jfu)
        .map(|(u, j)| decay * u + gain * (j + h))
        .collect()
}

/// `u⁺ = e^{-dt} u + (1 - e^{-dt}) (J∗f(u) + h)`.
pub fn step_exponential_euler(params: &ModelParams, u: &Field, dt: f64) -> Result<Field> {
    params.grid().check_same(u.grid())?;
    check_dt(dt)?;
    let jfu = params.plan.apply_raw(&params.firing_values(u.values()));
    finite_field(params, exp_euler_values(u.values(), &jfu, params.h, dt))
}

fn rk4_values(params: &ModelParams, u: &[f64], k1: Vec<f64>, dt: f64) -> Vec<f64> {
    let eval = |v: &[f64]| {
        let jfv = params.plan.apply_raw(&params.firing_values(v));
        assemble_rhs(v, &jfv, params.h)
    };
    let axpy =
        |k: &[f64], s: f64| -> Vec<f64> { u.iter().zip(k).map(|(u, k)| u + s * k).collect() };
    let k2 = eval(&axpy(&k1, dt / 2.0));
    let k3 = eval(&axpy(&k2, dt / 2.0));
    let k4 = eval(&axpy(&k3, dt));
    (0..u.len())
        .map(|i| u[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Classical four-stage Runge–Kutta step on `u' = rhs(u)`.
pub fn step_rk4(params: &ModelParams, u: &Field, dt: f64) -> Result<Field> {
    params.grid().check_same(u.grid())?;
    check_dt(dt)?;
    let k1 = rhs(params, u)?.into_values();
    finite_field(params, rk4_values(params, u.values(), k1, dt))
}

fn check_dt(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("dt must be positive, got {dt}")))
    }
}

fn finite_field(params: &ModelParams, values: Vec<f64>) -> Result<Field> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(Field::from_parts(params.grid().clone(), values))
    } else {
        Err(Error::NonFinite("state after step".into()))
    }
}

/// Integrates from `u0` over `[0, t_end]`, recording diagnostics every
/// `record_every` steps and at the final time.
pub fn simulate(
    params: &ModelParams,
    config: &SimConfig,
    norm: &WeightedLp,
    u0: &Field,
) -> Result<Trajectory> {
    config.validate()?;
    params.grid().check_same(u0.grid())?;
    params.grid().check_same(norm.grid())?;
    let lyapunov = if params.firing.is_strictly_increasing() {
        Some(LyapunovContext::new(params)?)
    } else {
        None
    };
    let steps = config.steps();
    let mut diag = DiagnosticsSeries {
        lyapunov_g: lyapunov.as_ref().map(|_| Vec::new()),
        dg_dt: lyapunov.as_ref().map(|_| Vec::new()),
        ..Default::default()
    };
    let mut times = Vec::new();
    let mut snapshots = Vec::new();
    let mut u = u0.values().to_vec();
    for step in 0..=steps {
        let t = step as f64 * config.dt;
        let fu = params.firing_values(&u);
        let jfu = params.plan.apply_raw(&fu);
        if step % config.record_every == 0 || step == steps {
            times.push(t);
            diag.t.push(t);
            diag.lp_norm.push(norm.norm_of(&u));
            diag.sup_norm
                .push(u.iter().fold(0.0, |m: f64, v| m.max(v.abs())));
            if let Some(ctx) = &lyapunov {
                let (g, rate) = ctx.evaluate(params, &u, &fu, &jfu)?;
                diag.lyapunov_g.as_mut().unwrap().push(g);
                diag.dg_dt.as_mut().unwrap().push(rate);
            }
            if config.keep_snapshots || step == steps {
                snapshots.push(Field::from_parts(params.grid().clone(), u.clone()));
            }
        }
        if step == steps {
            break;
        }
        u = match config.integrator {
            Integrator::ExponentialEuler => exp_euler_values(&u, &jfu, params.h, config.dt),
            Integrator::Rk4 => {
                let k1 = assemble_rhs(&u, &jfu, params.h);
                rk4_values(params, &u, k1, config.dt)
            }
        };
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverged {
                step: step + 1,
                t: (step + 1) as f64 * config.dt,
            });
        }
    }
    Ok(Trajectory {
        dt: config.dt,
        times,
        snapshots,
        diagnostics: diag,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Equilibrium {
    pub u0: f64,
    /// Proven unique when `‖J‖₁ k₁ < 1`.
    pub unique: bool,
    pub residual: f64,
}

/// Root of `u - l1 f(u) - h` by bisection on `[h, l1 a + h]`, carried to
/// machine precision.
pub fn homogeneous_equilibrium(firing: &FiringRate, l1_norm: f64, h: f64) -> Result<Equilibrium> {
    if !(l1_norm >= 0.0 && l1_norm.is_finite()) {
        return Err(Error::Parameter(format!(
            "l1 norm must be non-negative, got {l1_norm}"
        )));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Parameter(format!(
            "stimulus must satisfy h > 0, got {h}"
        )));
    }
    let g = |u: f64| u - l1_norm * firing.eval(u) - h;
    let (mut lo, mut hi) = (h, l1_norm * firing.bound() + h);
    let root = if g(lo) >= 0.0 {
        lo
    } else if g(hi) <= 0.0 {
        hi
    } else {
        loop {
            let mid = lo + (hi - lo) / 2.0;
            if mid <= lo || mid >= hi {
                break if g(lo).abs() <= g(hi).abs() { lo } else { hi };
            }
            if g(mid) <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    };
    Ok(Equilibrium {
        u0: root,
        unique: l1_norm * firing.lipschitz_constant() < 1.0,
        residual: g(root).abs(),
    })
}

/// The stimulus `h = u0 - l1 f(u0)` that makes `u0` a resting state.
pub fn resting_stimulus(firing: &FiringRate, l1_norm: f64, u0: f64) -> Result<f64> {
    if !u0.is_finite() {
        return Err(Error::NonFinite("resting level".into()));
    }
    let h = u0 - l1_norm * firing.eval(u0);
    if h > 0.0 {
        Ok(h)
    } else {
        Err(Error::OutOfModel(format!(
            "resting level {u0} needs stimulus h = {h}, but the model requires h > 0"
        )))
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LipschitzReport {
    pub trials: usize,
    pub max_quotient: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Monte-Carlo maximum of `‖F(u) - F(v)‖ / ‖u - v‖` against
/// `1 + K^{1/p} ‖J‖₁ k₁`.
///
/// Fields vanish within distance one of the boundary (see
/// [`crate::convolution::convolution_bound_sweep`]). Half the pairs are far apart,
/// half are small perturbations of a random state.
pub fn certify_lipschitz(
    params: &ModelParams,
    norm: &WeightedLp,
    trials: usize,
    seed: u64,
) -> Result<LipschitzReport> {
    if trials == 0 {
        return Err(Error::Parameter("trials must be at least 1".into()));
    }
    params.grid().check_same(norm.grid())?;
    let scale = params.firing.bound() * params.l1_norm().max(1.0) + params.h;
    let mut sampler = RandomFieldSampler::new(params.grid(), seed)
        .with_support_margin(1.0)?
        .with_amplitude(scale);
    let mut max_quotient = 0.0f64;
    let mut done = 0;
    while done < trials {
        let u = sampler.draw();
        let w = sampler.draw();
        let step = if done % 2 == 0 { 1.0 } else { 1e-3 };
        let v: Vec<f64> = u
            .values()
            .iter()
            .zip(w.values())
            .map(|(a, b)| if step == 1.0 { *b } else { a + step * b })
            .collect();
        let diff: Vec<f64> = u.values().iter().zip(&v).map(|(a, b)| a - b).collect();
        let denom = norm.norm_of(&diff);
        if denom == 0.0 {
            continue;
        }
        let fu = params.plan.apply_raw(&params.firing_values(u.values()));
        let fv = params.plan.apply_raw(&params.firing_values(&v));
        let ru = assemble_rhs(u.values(), &fu, params.h);
        let rv = assemble_rhs(&v, &fv, params.h);
        let num: Vec<f64> = ru.iter().zip(&rv).map(|(a, b)| a - b).collect();
        max_quotient = max_quotient.max(norm.norm_of(&num) / denom);
        done += 1;
    }
    let bound =
        1.0 + norm.k().powf(1.0 / norm.p()) * params.l1_norm() * params.firing.lipschitz_constant();
    Ok(LipschitzReport {
        trials,
        max_quotient,
        bound,
        pass: max_quotient <= bound * (1.0 + LIPSCHITZ_SLACK),
    })
}
