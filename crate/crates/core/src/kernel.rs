//! Connectivity kernels: even, nonnegative, C¹ radial profiles supported in
//! the closed unit ball, sampled once on a stencil matching the field grid.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Coarsest allowed stencil spacing (four points per unit radius).
pub const MAX_KERNEL_SPACING: f64 = 0.25;
/// Relative slack of [`verify_h4`].
pub const H4_SLACK: f64 = 1e-3;
/// Sub-intervals used for radial quadrature of profiles without closed forms.
pub const RADIAL_QUADRATURE_INTERVALS: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelFamily {
    /// `A exp(1 - 1/(1 - |x|^2))` for `|x| < 1`; peak value `A` at the origin.
    Bump { amplitude: f64 },
    /// `c (1 - |x|^2)^2` for `|x| <= 1`.
    PolynomialBump { coefficient: f64 },
}

#[derive(Clone, Debug, PartialEq)]
enum Profile {
    Polynomial { c: f64 },
    Bump { amplitude: f64 },
    Blend(Box<Profile>, Box<Profile>, f64),
    Scaled(Box<Profile>, f64),
}

/// `∫_0^1 r^k (1 - r^2)^2 dr` for `k = 0, 1, 2`.
const POLY_MOMENTS: [f64; 3] = [8.0 / 15.0, 1.0 / 6.0, 8.0 / 105.0];

fn bump_shape(r: f64) -> f64 {
    if r >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r * r)).exp()
    }
}

/// Composite Simpson on [0, 1] with an even number of sub-intervals.
fn simpson_unit<F: Fn(f64) -> f64>(f: F, intervals: usize) -> f64 {
    let h = 1.0 / intervals as f64;
    let mut sum = f(0.0) + f(1.0);
    for k in 1..intervals {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(k as f64 * h);
    }
    sum * h / 3.0
}

impl Profile {
    fn value(&self, r: f64) -> f64 {
        match self {
            Profile::Polynomial { c } => {
                if r > 1.0 {
                    0.0
                } else {
                    let s = 1.0 - r * r;
                    c * s * s
                }
            }
            Profile::Bump { amplitude } => amplitude * bump_shape(r),
            Profile::Blend(a, b, eps) => (1.0 - eps) * a.value(r) + eps * b.value(r),
            Profile::Scaled(p, s) => s * p.value(r),
        }
    }

    /// dψ/dr
    fn slope(&self, r: f64) -> f64 {
        match self {
            Profile::Polynomial { c } => {
                if r > 1.0 {
                    0.0
                } else {
                    -4.0 * c * r * (1.0 - r * r)
                }
            }
            Profile::Bump { amplitude } => {
                if r >= 1.0 {
                    0.0
                } else {
                    let s = 1.0 - r * r;
                    -amplitude * bump_shape(r) * 2.0 * r / (s * s)
                }
            }
            Profile::Blend(a, b, eps) => (1.0 - eps) * a.slope(r) + eps * b.slope(r),
            Profile::Scaled(p, s) => s * p.slope(r),
        }
    }

    /// `∫_0^1 r^k ψ(r) dr`, and whether it came from a closed form.
    fn moment(&self, k: usize) -> (f64, bool) {
        match self {
            Profile::Polynomial { c } => (c * POLY_MOMENTS[k], true),
            Profile::Bump { amplitude } => (
                amplitude
                    * simpson_unit(
                        |r| r.powi(k as i32) * bump_shape(r),
                        RADIAL_QUADRATURE_INTERVALS,
                    ),
                false,
            ),
            Profile::Blend(a, b, eps) => {
                let (ma, ca) = a.moment(k);
                let (mb, cb) = b.moment(k);
                ((1.0 - eps) * ma + eps * mb, ca && cb)
            }
            Profile::Scaled(p, s) => {
                let (m, c) = p.moment(k);
                (s * m, c)
            }
        }
    }

    /// Continuous `∫_{R^N} ψ(|x|) dx`.
    fn mass(&self, dim: usize) -> (f64, bool) {
        match dim {
            0 => (self.value(0.0), true),
            1 => {
                let (m, c) = self.moment(0);
                (2.0 * m, c)
            }
            2 => {
                let (m, c) = self.moment(1);
                (2.0 * PI * m, c)
            }
            3 => {
                let (m, c) = self.moment(2);
                (4.0 * PI * m, c)
            }
            _ => unreachable!(),
        }
    }

    /// `sup_i ∫ |∂_i J| dx`. Each profile is radially nonincreasing, so along
    /// any line parallel to an axis `J` is unimodal and `∫ |∂_i J| dx_i`
    /// equals twice the peak on that line; integrating the peaks over the
    /// orthogonal hyperplane gives twice the (N-1)-dimensional mass.
    fn deriv_bound(&self, dim: usize) -> (f64, bool) {
        let (m, c) = self.mass(dim - 1);
        (2.0 * m, c)
    }
}

#[derive(Clone, Debug)]
pub struct Kernel {
    nominal: Option<KernelFamily>,
    profile: Profile,
    dim: usize,
    spacing: Vec<f64>,
    radius: Vec<usize>,
    samples: Vec<f64>,
    l1_norm: f64,
    deriv_bound: f64,
    deriv_bound_resolution: Option<usize>,
}

fn shape_mass(family: KernelFamily, dim: usize) -> f64 {
    unit_profile(family).mass(dim).0
}

fn unit_profile(family: KernelFamily) -> Profile {
    match family {
        KernelFamily::Bump { .. } => Profile::Bump { amplitude: 1.0 },
        KernelFamily::PolynomialBump { .. } => Profile::Polynomial { c: 1.0 },
    }
}

fn with_scale(family: KernelFamily, scale: f64) -> KernelFamily {
    match family {
        KernelFamily::Bump { .. } => KernelFamily::Bump { amplitude: scale },
        KernelFamily::PolynomialBump { .. } => KernelFamily::PolynomialBump { coefficient: scale },
    }
}

fn family_scale(family: KernelFamily) -> f64 {
    match family {
        KernelFamily::Bump { amplitude } => amplitude,
        KernelFamily::PolynomialBump { coefficient } => coefficient,
    }
}

fn profile_of(family: KernelFamily) -> Profile {
    match family {
        KernelFamily::Bump { amplitude } => Profile::Bump { amplitude },
        KernelFamily::PolynomialBump { coefficient } => Profile::Polynomial { c: coefficient },
    }
}

fn stencil_radius(spacing: &[f64]) -> Vec<usize> {
    spacing
        .iter()
        .map(|dx| (1.0 / dx).ceil() as usize)
        .collect()
}

fn stencil_len(radius: &[usize]) -> usize {
    radius.iter().map(|r| 2 * r + 1).product()
}

/// Offsets (in cells) of stencil entry `flat`.
fn stencil_offset(radius: &[usize], mut flat: usize) -> [isize; 3] {
    let mut off = [0isize; 3];
    for axis in (0..radius.len()).rev() {
        let n = 2 * radius[axis] + 1;
        off[axis] = (flat % n) as isize - radius[axis] as isize;
        flat /= n;
    }
    off
}

fn sample_profile<F: Fn(&[f64]) -> f64>(spacing: &[f64], radius: &[usize], f: F) -> Vec<f64> {
    let dim = spacing.len();
    (0..stencil_len(radius))
        .map(|flat| {
            let off = stencil_offset(radius, flat);
            let mut x = [0.0; 3];
            for i in 0..dim {
                x[i] = off[i] as f64 * spacing[i];
            }
            f(&x[..dim])
        })
        .collect()
}

fn check_spacing(dim: usize, spacing: &[f64]) -> Result<()> {
    if !(1..=3).contains(&dim) {
        return Err(Error::Parameter(format!(
            "dimension must be 1..=3, got {dim}"
        )));
    }
    if spacing.len() != dim {
        return Err(Error::Shape(format!(
            "expected {dim} spacings, got {}",
            spacing.len()
        )));
    }
    for &dx in spacing {
        if !(dx > 0.0) {
            return Err(Error::Parameter(format!(
                "spacing must be positive, got {dx}"
            )));
        }
        if dx > MAX_KERNEL_SPACING {
            return Err(Error::Resolution(format!(
                "spacing {dx} exceeds {MAX_KERNEL_SPACING}; need at least 4 points per unit radius"
            )));
        }
    }
    Ok(())
}

/// Samples a kernel family on the stencil for the given grid spacing.
///
/// With `normalize_to`, the family's scale is set from the closed-form mass
/// and then corrected so the discrete quadrature of the samples equals the
/// target exactly (up to rounding).
pub fn make_kernel(
    family: KernelFamily,
    dim: usize,
    spacing: &[f64],
    normalize_to: Option<f64>,
) -> Result<Kernel> {
    check_spacing(dim, spacing)?;
    let scale = family_scale(family);
    if !(scale >= 0.0 && scale.is_finite()) {
        return Err(Error::Parameter(format!(
            "kernel scale must be non-negative, got {scale}"
        )));
    }
    let (nominal, profile) = match normalize_to {
        Some(target) => {
            if !(target > 0.0 && target.is_finite()) {
                return Err(Error::Parameter(format!(
                    "normalization target must be positive, got {target}"
                )));
            }
            let closed = target / shape_mass(family, dim);
            let nominal = with_scale(family, closed);
            let radius = stencil_radius(spacing);
            let trial = Kernel::assemble(None, profile_of(nominal), dim, spacing, &radius);
            let corrected = closed * target / trial.l1_norm;
            (nominal, profile_of(with_scale(family, corrected)))
        }
        None => (family, profile_of(family)),
    };
    let radius = stencil_radius(spacing);
    Ok(Kernel::assemble(
        Some(nominal),
        profile,
        dim,
        spacing,
        &radius,
    ))
}

impl Kernel {
    fn assemble(
        nominal: Option<KernelFamily>,
        profile: Profile,
        dim: usize,
        spacing: &[f64],
        radius: &[usize],
    ) -> Kernel {
        let samples = sample_profile(spacing, radius, |x| {
            profile.value(x.iter().map(|v| v * v).sum::<f64>().sqrt())
        });
        let cell: f64 = spacing.iter().product();
        // samples vanish on the stencil rim, so the plain sum is the trapezoid rule
        let l1_norm = samples.iter().sum::<f64>() * cell;
        let (deriv_bound, closed) = profile.deriv_bound(dim);
        Kernel {
            nominal,
            profile,
            dim,
            spacing: spacing.to_vec(),
            radius: radius.to_vec(),
            samples,
            l1_norm,
            deriv_bound,
            deriv_bound_resolution: if closed {
                None
            } else {
                Some(RADIAL_QUADRATURE_INTERVALS)
            },
        }
    }

    /// Family with the closed-form scale it was built from, if any.
    pub fn nominal_family(&self) -> Option<KernelFamily> {
        self.nominal
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    /// Stencil half-width in cells per axis, `ceil(1/Δx)`.
    pub fn radius(&self) -> &[usize] {
        &self.radius
    }

    /// Stencil points per axis, `2 * radius + 1`.
    pub fn stencil_counts(&self) -> Vec<usize> {
        self.radius.iter().map(|r| 2 * r + 1).collect()
    }

    /// Row-major samples over the stencil.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn stencil_offset(&self, flat: usize) -> [isize; 3] {
        stencil_offset(&self.radius, flat)
    }

    /// Discrete quadrature of the samples, the mass the convolution actually uses.
    pub fn l1_norm(&self) -> f64 {
        self.l1_norm
    }

    /// Continuous `∫ J` of the analytic profile.
    pub fn continuous_l1_norm(&self) -> f64 {
        self.profile.mass(self.dim).0
    }

    /// `S = sup_i ∫ |∂_i J| dx`.
    pub fn deriv_bound(&self) -> f64 {
        self.deriv_bound
    }

    /// Radial quadrature resolution behind [`Self::deriv_bound`], or `None`
    /// when it is a closed form.
    pub fn deriv_bound_resolution(&self) -> Option<usize> {
        self.deriv_bound_resolution
    }

    /// Analytic kernel value at `x`.
    pub fn value_at(&self, x: &[f64]) -> f64 {
        self.profile
            .value(x.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// Analytic `∂J/∂x_axis` at `x`.
    pub fn gradient_at(&self, x: &[f64], axis: usize) -> f64 {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r == 0.0 {
            0.0
        } else {
            self.profile.slope(r) * x[axis] / r
        }
    }

    /// `∂J/∂x_axis` sampled on the stencil.
    pub fn gradient_samples(&self, axis: usize) -> Result<Vec<f64>> {
        if axis >= self.dim {
            return Err(Error::Parameter(format!("axis {axis} out of range")));
        }
        Ok(sample_profile(&self.spacing, &self.radius, |x| {
            self.gradient_at(x, axis)
        }))
    }

    /// The kernel multiplied by a non-negative factor.
    pub fn scaled(&self, factor: f64) -> Result<Kernel> {
        if !(factor >= 0.0 && factor.is_finite()) {
            return Err(Error::Parameter(format!(
                "scale must be non-negative, got {factor}"
            )));
        }
        Ok(Kernel::assemble(
            self.nominal
                .map(|f| with_scale(f, family_scale(f) * factor)),
            Profile::Scaled(Box::new(self.profile.clone()), factor),
            self.dim,
            &self.spacing,
            &self.radius,
        ))
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct H4Report {
    pub s_observed: f64,
    pub s_claimed: f64,
    pub pass: bool,
}

/// Re-derives `S` from central differences of the analytic kernel on a 4×
/// refined stencil.
pub fn verify_h4(kernel: &Kernel) -> H4Report {
    let fine: Vec<f64> = kernel.spacing.iter().map(|dx| dx / 4.0).collect();
    let radius = stencil_radius(&fine);
    let cell: f64 = fine.iter().product();
    let s_observed = (0..kernel.dim)
        .map(|axis| {
            let h = fine[axis];
            let diffs = sample_profile(&fine, &radius, |x| {
                let mut plus = [0.0; 3];
                let mut minus = [0.0; 3];
                plus[..x.len()].copy_from_slice(x);
                minus[..x.len()].copy_from_slice(x);
                plus[axis] += h;
                minus[axis] -= h;
                (kernel.value_at(&plus[..x.len()]) - kernel.value_at(&minus[..x.len()])) / (2.0 * h)
            });
            diffs.iter().map(|d| d.abs()).sum::<f64>() * cell
        })
        .fold(0.0, f64::max);
    H4Report {
        s_observed,
        s_claimed: kernel.deriv_bound,
        pass: s_observed <= kernel.deriv_bound * (1.0 + H4_SLACK),
    }
}

/// `(1 - ε) J0 + ε J1` on a shared stencil.
pub fn blend_kernels(j0: &Kernel, j1: &Kernel, epsilon: f64) -> Result<Kernel> {
    if j0.dim != j1.dim || j0.spacing != j1.spacing {
        return Err(Error::Shape("kernels live on different stencils".into()));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Parameter(format!(
            "epsilon must lie in [0, 1], got {epsilon}"
        )));
    }
    let samples: Vec<f64> = j0
        .samples
        .iter()
        .zip(&j1.samples)
        .map(|(a, b)| (1.0 - epsilon) * a + epsilon * b)
        .collect();
    let cell: f64 = j0.spacing.iter().product();
    let l1_norm = samples.iter().sum::<f64>() * cell;
    let profile = Profile::Blend(
        Box::new(j0.profile.clone()),
        Box::new(j1.profile.clone()),
        epsilon,
    );
    let (deriv_bound, closed) = profile.deriv_bound(j0.dim);
    Ok(Kernel {
        nominal: None,
        profile,
        dim: j0.dim,
        spacing: j0.spacing.clone(),
        radius: j0.radius.clone(),
        samples,
        l1_norm,
        deriv_bound,
        deriv_bound_resolution: if closed {
            None
        } else {
            Some(RADIAL_QUADRATURE_INTERVALS)
        },
    })
}
