//! Line-oriented `section.key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::convolution::{ConvolutionPlan, Engine};
use crate::dynamics::{Integrator, ModelParams, SimConfig, DT_CAP};
use crate::error::{Error, Result};
use crate::firing::{FiringFamily, FiringRate};
use crate::grid::{GridSpec, MAX_DIM, MIN_HALF_WIDTH};
use crate::kernel::{blend_kernels, make_kernel, Kernel, KernelFamily, MAX_KERNEL_SPACING};
use crate::weight::{make_weight, Weight, WeightFamily, WeightedLp};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelChoice {
    PolynomialBump,
    Bump,
}

impl KernelChoice {
    fn name(self) -> &'static str {
        match self {
            KernelChoice::PolynomialBump => "polynomial_bump",
            KernelChoice::Bump => "bump",
        }
    }

    /// Unit-scale family; the scale is fixed by normalization.
    pub fn family(self) -> KernelFamily {
        match self {
            KernelChoice::PolynomialBump => KernelFamily::PolynomialBump { coefficient: 1.0 },
            KernelChoice::Bump => KernelFamily::Bump { amplitude: 1.0 },
        }
    }

    /// The other family, used as the perturbation direction in sweeps.
    pub fn partner(self) -> KernelChoice {
        match self {
            KernelChoice::PolynomialBump => KernelChoice::Bump,
            KernelChoice::Bump => KernelChoice::PolynomialBump,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightChoice {
    Exponential,
    Polynomial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiringChoice {
    Sigmoid,
    Ramp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    pub points: usize,
    pub half_width: f64,
    pub p: f64,
    pub engine: Engine,
    pub h: f64,
    pub kernel: KernelChoice,
    pub normalize_l1: f64,
    pub blend_epsilon: f64,
    pub weight: WeightChoice,
    pub lambda: f64,
    pub q: f64,
    pub firing: FiringChoice,
    pub a: f64,
    pub beta: f64,
    pub theta: f64,
    pub slope: f64,
    pub dt: f64,
    pub t_end: f64,
    pub integrator: Integrator,
    pub record_every: usize,
    pub seed: u64,
    pub t_transient: f64,
    pub t_sample: f64,
    pub n_initial: usize,
    pub epsilons: Vec<f64>,
    pub trials: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dim: 1,
            points: 1025,
            half_width: 8.0,
            p: 2.0,
            engine: Engine::Direct,
            h: 0.1,
            kernel: KernelChoice::PolynomialBump,
            normalize_l1: 1.0,
            blend_epsilon: 0.0,
            weight: WeightChoice::Exponential,
            lambda: 1.0,
            q: 3.0,
            firing: FiringChoice::Sigmoid,
            a: 1.0,
            beta: 4.0,
            theta: 0.5,
            slope: 1.0,
            dt: 1e-3,
            t_end: 10.0,
            integrator: Integrator::ExponentialEuler,
            record_every: 10,
            seed: 0,
            t_transient: 20.0,
            t_sample: 5.0,
            n_initial: 4,
            epsilons: vec![0.2, 0.1, 0.05, 0.025],
            trials: 100,
        }
    }
}

const KEYS: &[&str] = &[
    "space.dim",
    "space.points",
    "space.half_width",
    "space.p",
    "space.engine",
    "model.h",
    "model.p",
    "kernel.family",
    "kernel.normalize_l1",
    "kernel.blend_epsilon",
    "weight.family",
    "weight.lambda",
    "weight.q",
    "firing.family",
    "firing.a",
    "firing.beta",
    "firing.theta",
    "firing.slope",
    "sim.dt",
    "sim.t_end",
    "sim.integrator",
    "sim.record_every",
    "sim.seed",
    "analysis.t_transient",
    "analysis.t_sample",
    "analysis.n_initial",
    "analysis.epsilons",
    "analysis.trials",
];

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

struct Entries(BTreeMap<&'static str, (usize, String)>);

impl Entries {
    fn get<T>(
        &self,
        key: &str,
        default: T,
        parse: impl Fn(&str) -> Option<T>,
    ) -> Result<(T, usize)> {
        match self.0.get(key) {
            None => Ok((default, 0)),
            Some((line, raw)) => parse(raw)
                .map(|v| (v, *line))
                .ok_or_else(|| err(*line, format!("malformed value `{raw}` for `{key}`"))),
        }
    }

    fn real(&self, key: &str, default: f64) -> Result<(f64, usize)> {
        self.get(key, default, |s| {
            s.parse::<f64>().ok().filter(|v| v.is_finite())
        })
    }

    fn count(&self, key: &str, default: usize) -> Result<(usize, usize)> {
        self.get(key, default, |s| s.parse().ok())
    }
}

fn check(ok: bool, line: usize, message: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(err(line, message()))
    }
}

/// Parses and validates a configuration. Omitted keys take their defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut entries = BTreeMap::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| {
            err(
                line,
                format!("expected `section.key = value`, got `{content}`"),
            )
        })?;
        let key = key.trim();
        let value = value.trim();
        let known = KEYS
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| err(line, format!("unknown key `{key}`")))?;
        if value.is_empty() {
            return Err(err(line, format!("missing value for `{key}`")));
        }
        if let Some((first, _)) = entries.insert(*known, (line, value.to_string())) {
            return Err(err(line, format!("`{key}` already set on line {first}")));
        }
    }
    if let (Some((l1, _)), Some((l2, _))) = (entries.get("space.p"), entries.get("model.p")) {
        return Err(err(*l1.max(l2), "set only one of `space.p` and `model.p`"));
    }
    if let Some(v) = entries.remove("model.p") {
        entries.insert("space.p", v);
    }
    build(&Entries(entries))
}

fn build(e: &Entries) -> Result<RunConfig> {
    let d = RunConfig::default();

    let (dim, l) = e.count("space.dim", d.dim)?;
    check((1..=MAX_DIM).contains(&dim), l, || {
        format!("space.dim must be 1, 2 or 3, got {dim}")
    })?;
    let (points, l) = e.count("space.points", d.points)?;
    check(points >= 3, l, || {
        format!("space.points must be at least 3, got {points}")
    })?;
    let (half_width, l) = e.real("space.half_width", d.half_width)?;
    check(half_width >= MIN_HALF_WIDTH, l, || {
        format!("space.half_width must be at least {MIN_HALF_WIDTH}, got {half_width}")
    })?;
    let spacing = 2.0 * half_width / (points - 1) as f64;
    check(
        spacing <= MAX_KERNEL_SPACING,
        l.max(e.count("space.points", 0)?.1),
        || {
            format!(
                "grid spacing {spacing} exceeds the kernel resolution limit {MAX_KERNEL_SPACING}"
            )
        },
    )?;
    let (p, l) = e.real("space.p", d.p)?;
    check(p > 1.0, l, || format!("p must satisfy p > 1, got {p}"))?;
    let (engine, _) = e.get("space.engine", d.engine, |s| s.parse().ok())?;

    let (h, l) = e.real("model.h", d.h)?;
    check(h > 0.0, l, || format!("model.h = {h} violates h > 0"))?;

    let (kernel, _) = e.get("kernel.family", d.kernel, |s| match s {
        "polynomial_bump" => Some(KernelChoice::PolynomialBump),
        "bump" => Some(KernelChoice::Bump),
        _ => None,
    })?;
    let (normalize_l1, l) = e.real("kernel.normalize_l1", d.normalize_l1)?;
    check(normalize_l1 > 0.0, l, || {
        format!("kernel.normalize_l1 must be positive, got {normalize_l1}")
    })?;
    let (blend_epsilon, l) = e.real("kernel.blend_epsilon", d.blend_epsilon)?;
    check((0.0..=1.0).contains(&blend_epsilon), l, || {
        format!("kernel.blend_epsilon must lie in [0, 1], got {blend_epsilon}")
    })?;

    let (weight, _) = e.get("weight.family", d.weight, |s| match s {
        "exponential" => Some(WeightChoice::Exponential),
        "polynomial" => Some(WeightChoice::Polynomial),
        _ => None,
    })?;
    let (lambda, l) = e.real("weight.lambda", d.lambda)?;
    check(lambda > 0.0, l, || {
        format!("weight.lambda must be positive, got {lambda}")
    })?;
    let (q, l) = e.real("weight.q", d.q)?;
    check(q > dim as f64, l.max(e.count("space.dim", 0)?.1), || {
        format!("weight.q = {q} must exceed the dimension {dim} for integrability")
    })?;

    let (firing, _) = e.get("firing.family", d.firing, |s| match s {
        "sigmoid" => Some(FiringChoice::Sigmoid),
        "ramp" => Some(FiringChoice::Ramp),
        _ => None,
    })?;
    let (a, l) = e.real("firing.a", d.a)?;
    check(a > 0.0, l, || format!("firing.a must be positive, got {a}"))?;
    let (beta, l) = e.real("firing.beta", d.beta)?;
    check(beta > 0.0, l, || {
        format!("firing.beta must be positive, got {beta}")
    })?;
    let (theta, _) = e.real("firing.theta", d.theta)?;
    let (slope, l) = e.real("firing.slope", d.slope)?;
    check(slope > 0.0, l, || {
        format!("firing.slope must be positive, got {slope}")
    })?;

    let (dt, l) = e.real("sim.dt", d.dt)?;
    check(dt > 0.0 && dt <= DT_CAP, l, || {
        format!("sim.dt = {dt} must lie in (0, {DT_CAP}] (dt cap)")
    })?;
    let (t_end, l) = e.real("sim.t_end", d.t_end)?;
    check(t_end >= dt, l, || {
        format!("sim.t_end = {t_end} must be at least sim.dt = {dt}")
    })?;
    let (integrator, _) = e.get("sim.integrator", d.integrator, |s| s.parse().ok())?;
    let (record_every, l) = e.count("sim.record_every", d.record_every)?;
    check(record_every >= 1, l, || {
        "sim.record_every must be at least 1".into()
    })?;
    let (seed, _) = e.get("sim.seed", d.seed, |s| s.parse().ok())?;

    let (t_transient, l) = e.real("analysis.t_transient", d.t_transient)?;
    check(t_transient >= 5.0, l, || {
        format!("analysis.t_transient must be at least 5, got {t_transient}")
    })?;
    let (t_sample, l) = e.real("analysis.t_sample", d.t_sample)?;
    check(t_sample >= 0.0, l, || {
        format!("analysis.t_sample must be non-negative, got {t_sample}")
    })?;
    let (n_initial, l) = e.count("analysis.n_initial", d.n_initial)?;
    check(n_initial >= 1, l, || {
        "analysis.n_initial must be at least 1".into()
    })?;
    let (epsilons, l) = e.get("analysis.epsilons", d.epsilons.clone(), |s| {
        s.split(',')
            .map(|v| v.trim().parse::<f64>().ok())
            .collect::<Option<Vec<_>>>()
    })?;
    check(
        !epsilons.is_empty()
            && epsilons.iter().all(|&v| v > 0.0 && v <= 1.0)
            && epsilons.windows(2).all(|w| w[0] > w[1]),
        l,
        || "analysis.epsilons must decrease strictly within (0, 1]".into(),
    )?;
    let (trials, l) = e.count("analysis.trials", d.trials)?;
    check(trials >= 1, l, || {
        "analysis.trials must be at least 1".into()
    })?;

    Ok(RunConfig {
        dim,
        points,
        half_width,
        p,
        engine,
        h,
        kernel,
        normalize_l1,
        blend_epsilon,
        weight,
        lambda,
        q,
        firing,
        a,
        beta,
        theta,
        slope,
        dt,
        t_end,
        integrator,
        record_every,
        seed,
        t_transient,
        t_sample,
        n_initial,
        epsilons,
        trials,
    })
}

impl RunConfig {
    /// Every key, in a form [`parse_config`] reads back to an equal value.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("space.dim", self.dim.to_string());
        put("space.points", self.points.to_string());
        put("space.half_width", self.half_width.to_string());
        put("space.p", self.p.to_string());
        put("space.engine", self.engine.to_string());
        put("model.h", self.h.to_string());
        put("kernel.family", self.kernel.name().into());
        put("kernel.normalize_l1", self.normalize_l1.to_string());
        put("kernel.blend_epsilon", self.blend_epsilon.to_string());
        put(
            "weight.family",
            match self.weight {
                WeightChoice::Exponential => "exponential",
                WeightChoice::Polynomial => "polynomial",
            }
            .into(),
        );
        put("weight.lambda", self.lambda.to_string());
        put("weight.q", self.q.to_string());
        put(
            "firing.family",
            match self.firing {
                FiringChoice::Sigmoid => "sigmoid",
                FiringChoice::Ramp => "ramp",
            }
            .into(),
        );
        put("firing.a", self.a.to_string());
        put("firing.beta", self.beta.to_string());
        put("firing.theta", self.theta.to_string());
        put("firing.slope", self.slope.to_string());
        put("sim.dt", self.dt.to_string());
        put("sim.t_end", self.t_end.to_string());
        put("sim.integrator", self.integrator.to_string());
        put("sim.record_every", self.record_every.to_string());
        put("sim.seed", self.seed.to_string());
        put("analysis.t_transient", self.t_transient.to_string());
        put("analysis.t_sample", self.t_sample.to_string());
        put("analysis.n_initial", self.n_initial.to_string());
        put(
            "analysis.epsilons",
            self.epsilons
                .iter()
                .map(f64::to_string)
                .collect::<Vec<_>>()
                .join(", "),
        );
        put("analysis.trials", self.trials.to_string());
        s
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::symmetric(self.dim, self.points, self.half_width)
    }

    /// The configured family normalized to `normalize_l1`.
    pub fn base_kernel(&self, grid: &GridSpec) -> Result<Kernel> {
        make_kernel(
            self.kernel.family(),
            self.dim,
            grid.spacing(),
            Some(self.normalize_l1),
        )
    }

    /// The partner family at twice the mass; the direction of perturbation.
    pub fn partner_kernel(&self, grid: &GridSpec) -> Result<Kernel> {
        make_kernel(
            self.kernel.partner().family(),
            self.dim,
            grid.spacing(),
            Some(2.0 * self.normalize_l1),
        )
    }

    /// The kernel used for single-model runs: the base kernel blended
    /// towards its partner by `blend_epsilon`.
    pub fn kernel(&self, grid: &GridSpec) -> Result<Kernel> {
        let base = self.base_kernel(grid)?;
        if self.blend_epsilon == 0.0 {
            return Ok(base);
        }
        blend_kernels(&base, &self.partner_kernel(grid)?, self.blend_epsilon)
    }

    pub fn weight(&self) -> Result<Weight> {
        let family = match self.weight {
            WeightChoice::Exponential => WeightFamily::Exponential { rate: self.lambda },
            WeightChoice::Polynomial => WeightFamily::PolynomialDecay { exponent: self.q },
        };
        make_weight(family, self.dim)
    }

    pub fn norm(&self, grid: &GridSpec) -> Result<WeightedLp> {
        WeightedLp::new(&self.weight()?, grid, self.p)
    }

    pub fn firing_rate(&self) -> Result<FiringRate> {
        FiringRate::new(match self.firing {
            FiringChoice::Sigmoid => FiringFamily::Sigmoid {
                a: self.a,
                beta: self.beta,
                theta: self.theta,
            },
            FiringChoice::Ramp => FiringFamily::SaturatingRamp {
                a: self.a,
                slope: self.slope,
                theta: self.theta,
            },
        })
    }

    pub fn model(&self, grid: &GridSpec) -> Result<ModelParams> {
        let plan = ConvolutionPlan::new(self.engine, &self.kernel(grid)?, grid)?;
        ModelParams::new(plan, self.firing_rate()?, self.h)
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            dt: self.dt,
            t_end: self.t_end,
            integrator: self.integrator,
            record_every: self.record_every,
            seed: self.seed,
            keep_snapshots: false,
        }
    }
}
