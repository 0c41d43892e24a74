use rayon::prelude::*;
use serde::Serialize;

use crate::convolution::RandomFieldSampler;
use crate::dynamics::{simulate, ModelParams, SimConfig, Trajectory};
use crate::error::{Error, Result};
use crate::grid::Field;
use crate::kernel::{blend_kernels, Kernel};
use crate::weight::WeightedLp;

/// Slack on the absorbing inequality at the default time step.
pub const ABSORBING_SLACK: f64 = 1e-2;
/// Slack on the sup-norm bound.
pub const LINF_SLACK: f64 = 1e-6;
/// Slack on attractor containment in the weighted norm.
pub const CONTAINMENT_SLACK: f64 = 1e-3;
/// Smallest transient accepted by the attractor routines.
pub const MIN_TRANSIENT: f64 = 5.0;
/// Absorbing-ball margin as a fraction of `R`.
pub const BALL_MARGIN: f64 = 0.01;
/// Snapshots kept per initial condition during sampling.
const SNAPSHOTS_PER_RUN: usize = 50;

#[derive(Clone, Debug, Serialize)]
pub struct AbsorbingReport {
    pub r: f64,
    pub epsilon: f64,
    pub max_violation: f64,
    /// `ln(‖u(0)‖ / ε)`, or 0 when the run starts inside the ball.
    pub entry_time_bound: f64,
    /// Last recorded time with norm at or above `R + ε`, if any.
    pub last_time_outside: Option<f64>,
    pub entry_ok: bool,
    pub pass: bool,
}

/// Checks `‖u(t)‖ <= e^{-t} ‖u(0)‖ + R` at every recorded time, and that the
/// norm stays below `R + ε` after `ln(‖u(0)‖ / ε)` up to one time step.
pub fn certify_absorbing(
    trajectory: &Trajectory,
    norm: &WeightedLp,
    params: &ModelParams,
) -> Result<AbsorbingReport> {
    let d = &trajectory.diagnostics;
    if d.is_empty() {
        return Err(Error::Empty("trajectory has no diagnostics".into()));
    }
    let r = params.absorbing_radius(norm);
    let epsilon = BALL_MARGIN * r;
    let n0 = d.lp_norm[0];
    let max_violation =
        d.t.iter()
            .zip(&d.lp_norm)
            .map(|(t, n)| n - ((-t).exp() * n0 + r))
            .fold(f64::NEG_INFINITY, f64::max);
    let entry_time_bound = if n0 > epsilon {
        (n0 / epsilon).ln()
    } else {
        0.0
    };
    let last_time_outside =
        d.t.iter()
            .zip(&d.lp_norm)
            .filter(|(_, &n)| n >= r + epsilon)
            .map(|(&t, _)| t)
            .next_back();
    let entry_ok = last_time_outside.is_none_or(|t| t <= entry_time_bound + trajectory.dt);
    Ok(AbsorbingReport {
        r,
        epsilon,
        max_violation,
        entry_time_bound,
        last_time_outside,
        entry_ok,
        pass: entry_ok && max_violation <= ABSORBING_SLACK,
    })
}

/// Post-transient states collected from several initial conditions.
#[derive(Clone, Debug)]
pub struct AttractorSample {
    pub a: f64,
    pub l1_norm: f64,
    pub h: f64,
    pub t_transient: f64,
    pub t_sample: f64,
    pub initial_sup: Vec<f64>,
    pub initial_lp: Vec<f64>,
    pub snapshots: Vec<Field>,
}

impl AttractorSample {
    pub fn max_sup(&self) -> f64 {
        self.snapshots
            .iter()
            .map(Field::sup_norm)
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LinfReport {
    pub r: f64,
    pub max_sup: f64,
    /// `r + slack + e^{-t_transient} max sup|u(0)|`.
    pub allowance: f64,
    pub pass: bool,
}

/// Checks every snapshot against `sup|u| <= a ‖J‖₁ + h`, allowing for the
/// decaying trace of the initial state.
pub fn certify_linf_bound(sample: &AttractorSample) -> Result<LinfReport> {
    if sample.snapshots.is_empty() {
        return Err(Error::Empty("attractor sample has no snapshots".into()));
    }
    if sample.t_transient < MIN_TRANSIENT {
        return Err(Error::Parameter(format!(
            "transient must be at least {MIN_TRANSIENT}, got {}",
            sample.t_transient
        )));
    }
    let r = sample.a * sample.l1_norm + sample.h;
    let start = sample.initial_sup.iter().copied().fold(0.0, f64::max);
    let allowance = r + LINF_SLACK + (-sample.t_transient).exp() * start;
    let max_sup = sample.max_sup();
    Ok(LinfReport {
        r,
        max_sup,
        allowance,
        pass: max_sup <= allowance,
    })
}

/// Seeded initial states inside the ball `‖u‖ <= R + ε`, with sup norm at
/// most twice that radius.
pub fn initial_conditions(
    params: &ModelParams,
    norm: &WeightedLp,
    count: usize,
    seed: u64,
) -> Result<Vec<Field>> {
    let radius = (1.0 + BALL_MARGIN) * params.absorbing_radius(norm);
    let mut sampler = RandomFieldSampler::new(params.grid(), seed);
    let mut out = Vec::with_capacity(count);
    let mut k = 0usize;
    while out.len() < count {
        let u = sampler.draw();
        let sup = u.sup_norm();
        let lp = norm.norm(&u)?;
        if sup == 0.0 || lp == 0.0 {
            continue;
        }
        // spread targets over (0, 1] of the admissible scale
        let fraction = (k as f64 + 1.0) / count as f64;
        let scale = fraction * (radius / lp).min(2.0 * radius / sup);
        out.push(u.map(|v| v * scale)?);
        k += 1;
    }
    Ok(out)
}

/// Runs each initial condition through `[0, t_transient]`, then keeps states
/// over `[t_transient, t_transient + t_sample]`.
pub fn sample_attractor(
    params: &ModelParams,
    config: &SimConfig,
    norm: &WeightedLp,
    n_initial: usize,
    t_transient: f64,
    t_sample: f64,
) -> Result<AttractorSample> {
    if n_initial == 0 {
        return Err(Error::Parameter(
            "need at least one initial condition".into(),
        ));
    }
    if t_transient < MIN_TRANSIENT {
        return Err(Error::Parameter(format!(
            "transient must be at least {MIN_TRANSIENT}, got {t_transient}"
        )));
    }
    let initial = initial_conditions(params, norm, n_initial, config.seed)?;
    sample_from(params, config, norm, &initial, t_transient, t_sample)
}

/// [`sample_attractor`] from explicit initial states.
pub fn sample_from(
    params: &ModelParams,
    config: &SimConfig,
    norm: &WeightedLp,
    initial: &[Field],
    t_transient: f64,
    t_sample: f64,
) -> Result<AttractorSample> {
    if initial.is_empty() {
        return Err(Error::Empty("no initial conditions".into()));
    }
    let transient = SimConfig {
        t_end: t_transient,
        keep_snapshots: false,
        ..config.clone()
    };
    let sample_steps = (t_sample / config.dt).round() as usize;
    let sampling = SimConfig {
        t_end: t_sample,
        keep_snapshots: true,
        record_every: config
            .record_every
            .max(sample_steps.div_ceil(SNAPSHOTS_PER_RUN).max(1)),
        ..config.clone()
    };
    let runs: Vec<Vec<Field>> = initial
        .par_iter()
        .map(|u0| {
            let settled = simulate(params, &transient, norm, u0)?;
            if t_sample == 0.0 {
                return Ok(vec![settled.final_state().clone()]);
            }
            Ok(simulate(params, &sampling, norm, settled.final_state())?.snapshots)
        })
        .collect::<Result<_>>()?;
    Ok(AttractorSample {
        a: params.firing().bound(),
        l1_norm: params.l1_norm(),
        h: params.h(),
        t_transient,
        t_sample,
        initial_sup: initial.iter().map(Field::sup_norm).collect(),
        initial_lp: initial
            .iter()
            .map(|u| norm.norm(u))
            .collect::<Result<_>>()?,
        snapshots: runs.into_iter().flatten().collect(),
    })
}

/// `sup_{a∈A} inf_{b∈B} ‖a - b‖`.
pub fn semidistance(a: &AttractorSample, b: &AttractorSample, norm: &WeightedLp) -> Result<f64> {
    semidistance_of(&a.snapshots, &b.snapshots, norm)
}

/// [`semidistance`] on bare state sets.
pub fn semidistance_of(a: &[Field], b: &[Field], norm: &WeightedLp) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty(
            "semidistance needs two nonempty samples".into(),
        ));
    }
    a.par_iter()
        .map(|x| {
            b.iter()
                .map(|y| norm.distance(x, y))
                .try_fold(f64::INFINITY, |m, d| d.map(|d| m.min(d)))
        })
        .try_reduce(|| 0.0, |p, q| Ok(p.max(q)))
}

#[derive(Clone, Debug, Serialize)]
pub struct SemicontinuityRow {
    pub epsilon: f64,
    pub l1_norm: f64,
    pub semidistance: f64,
    pub r_max: f64,
    pub max_sup_norm: f64,
    pub max_lp_norm: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SemicontinuityReport {
    pub rows: Vec<SemicontinuityRow>,
    pub r_max: f64,
    /// Every sampled state lies in the ball of radius `R_max`.
    pub contained: bool,
}

impl SemicontinuityReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epsilon,semidistance,R_max,max_sup_norm\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:e},{:e},{:e}\n",
                r.epsilon, r.semidistance, r.r_max, r.max_sup_norm
            ));
        }
        out
    }
}

pub struct SemicontinuitySetup<'a> {
    pub j0: &'a Kernel,
    pub j1: &'a Kernel,
    pub params: &'a ModelParams,
    pub config: &'a SimConfig,
    pub norm: &'a WeightedLp,
    pub n_initial: usize,
    pub t_transient: f64,
    pub t_sample: f64,
}

/// Distance from the attractor of `(1 - ε) J0 + ε J1` to that of `J0` along
/// a decreasing ladder of `ε`, with every sampled state checked against the
/// absorbing radius of the heaviest kernel in the sweep.
pub fn semicontinuity_experiment(
    setup: &SemicontinuitySetup<'_>,
    epsilons: &[f64],
) -> Result<SemicontinuityReport> {
    if epsilons.is_empty() {
        return Err(Error::Empty("no epsilons given".into()));
    }
    if epsilons.windows(2).any(|w| w[0] <= w[1])
        || epsilons.iter().any(|e| !(0.0..=1.0).contains(e))
    {
        return Err(Error::Parameter(
            "epsilons must decrease strictly within [0, 1]".into(),
        ));
    }
    let sample = |kernel: &Kernel| -> Result<AttractorSample> {
        let params = setup.params.with_kernel(kernel)?;
        sample_attractor(
            &params,
            setup.config,
            setup.norm,
            setup.n_initial,
            setup.t_transient,
            setup.t_sample,
        )
    };
    let reference = sample(setup.j0)?;
    let kernels = epsilons
        .iter()
        .map(|&e| blend_kernels(setup.j0, setup.j1, e))
        .collect::<Result<Vec<_>>>()?;
    let heaviest = kernels
        .iter()
        .map(Kernel::l1_norm)
        .fold(setup.j0.l1_norm(), f64::max);
    let a = setup.params.firing().bound();
    let r_max = a * setup.norm.k().powf(1.0 / setup.norm.p()) * heaviest + setup.params.h();
    let mut rows = Vec::with_capacity(epsilons.len());
    let mut contained = reference
        .snapshots
        .iter()
        .map(|u| setup.norm.norm(u))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .all(|n| n <= r_max + CONTAINMENT_SLACK);
    for (&epsilon, kernel) in epsilons.iter().zip(&kernels) {
        let s = sample(kernel)?;
        let norms = s
            .snapshots
            .iter()
            .map(|u| setup.norm.norm(u))
            .collect::<Result<Vec<_>>>()?;
        let max_lp_norm = norms.iter().copied().fold(0.0, f64::max);
        contained &= max_lp_norm <= r_max + CONTAINMENT_SLACK;
        rows.push(SemicontinuityRow {
            epsilon,
            l1_norm: kernel.l1_norm(),
            semidistance: semidistance(&s, &reference, setup.norm)?,
            r_max,
            max_sup_norm: s.max_sup(),
            max_lp_norm,
        });
    }
    Ok(SemicontinuityReport {
        rows,
        r_max,
        contained,
    })
}
