//! Closed-form diffused densities and the LIDL slope β_t.
//!
//! For a flat component the diffused density factorizes as
//!
//! ```text
//! ρ_t(x, y) = (ψ ∗ φ_t^d)(x) · φ_t^{D−d}(y)
//! ```
//!
//! and its Laplacian splits into the Gaussian part in `y` plus the smoothed
//! on-manifold part in `x`. With `β_t = t Δρ_t / ρ_t` this gives
//!
//! ```text
//! β_t = ‖y‖²/t + (d − D) + t · Δ_x(ψ∗φ_t^d)(x) / (ψ∗φ_t^d)(x)
//! ```
//!
//! Mixtures are handled through the responsibility-weighted convex
//! combination of component slopes. Everything is evaluated in log space so
//! that grids reaching `t = 1e-16` neither overflow nor underflow.

use std::f64::consts::PI;

use crate::error::{check_time, Error, Result};
use crate::model::{check_point_dim, eval_psi, DensitySpec, ManifoldComponent, MixtureModel};
use crate::special::{ln_normal_interval, log_sum_exp};

/// Natural log of a density value. `-inf` encodes an exact zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogDensity(f64);

impl LogDensity {
    pub fn new(value: f64) -> Self {
        debug_assert!(!value.is_nan(), "log density is NaN");
        LogDensity(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn density(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
}

/// A value of β_t (or its limit) together with its bias against a reference
/// dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaValue {
    pub beta: f64,
    /// `beta − (d_ref − D)`.
    pub bias: f64,
    /// Set when the evaluation point lies off every supporting component, so
    /// that β_t → +∞ as t → 0.
    pub diverged: bool,
}

impl BetaValue {
    /// The LID estimate `D + β`.
    pub fn estimate(&self, ambient_dim: usize) -> f64 {
        ambient_dim as f64 + self.beta
    }
}

/// `ln φ_t^k(u)` with `k = u.len()`; `k = 0` gives 0.
pub fn log_gaussian_kernel(t: f64, u: &[f64]) -> Result<f64> {
    check_time(t)?;
    Ok(ln_kernel(t, u.len(), sq_norm(u)))
}

/// `Δφ_t^k(u) / φ_t^k(u) = ‖u‖²/t² − k/t`.
pub fn gaussian_kernel_laplacian_ratio(t: f64, u: &[f64]) -> Result<f64> {
    check_time(t)?;
    Ok(sq_norm(u) / (t * t) - u.len() as f64 / t)
}

fn sq_norm(u: &[f64]) -> f64 {
    u.iter().map(|v| v * v).sum()
}

fn ln_kernel(t: f64, k: usize, sq: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    -0.5 * k as f64 * (2.0 * PI * t).ln() - sq / (2.0 * t)
}

fn check_spec_dim(spec: &DensitySpec, x: &[f64]) -> Result<()> {
    match spec.implied_dim() {
        Some(d) if d != x.len() => Err(Error::PointDim {
            expected: d,
            got: x.len(),
        }),
        _ => Ok(()),
    }
}

/// `ln (ψ ∗ φ_t^d)(x)`.
pub fn log_smoothed_density(spec: &DensitySpec, t: f64, x: &[f64]) -> Result<LogDensity> {
    check_time(t)?;
    check_spec_dim(spec, x)?;
    let value = match spec {
        DensitySpec::ConstantOne | DensitySpec::Point => 0.0,
        DensitySpec::GaussianDiag { sigmas } => sigmas
            .iter()
            .zip(x)
            .map(|(s, &xi)| {
                let var = s * s + t;
                -0.5 * (2.0 * PI * var).ln() - xi * xi / (2.0 * var)
            })
            .sum(),
        DensitySpec::UniformBox { bounds } => bounds
            .iter()
            .zip(x)
            .map(|(&(a, b), &xi)| box_axis_ln_mass(a, b, t, xi) - (b - a).ln())
            .sum(),
    };
    Ok(LogDensity::new(value))
}

/// `ln(Φ_t(x − a) − Φ_t(x − b))`.
fn box_axis_ln_mass(a: f64, b: f64, t: f64, x: f64) -> f64 {
    let s = t.sqrt();
    ln_normal_interval((x - b) / s, (x - a) / s)
}

/// Per-axis `(ψ_i ∗ φ_t)'' / (ψ_i ∗ φ_t)` for a uniform interval:
///
/// ```text
/// [(x−b)φ_t(x−b) − (x−a)φ_t(x−a)] / (t · [Φ_t(x−a) − Φ_t(x−b)])
/// ```
fn box_axis_ratio(a: f64, b: f64, t: f64, x: f64) -> Result<f64> {
    let ln_mass = box_axis_ln_mass(a, b, t, x);
    if ln_mass == f64::NEG_INFINITY {
        return Err(Error::Diverged);
    }
    let (ub, ua) = (x - b, x - a);
    let (lb, la) = (-ub * ub / (2.0 * t), -ua * ua / (2.0 * t));
    let top = lb.max(la);
    let numerator = ub * (lb - top).exp() - ua * (la - top).exp();
    let ln_norm = -0.5 * (2.0 * PI * t).ln();
    Ok(numerator * (top + ln_norm - ln_mass).exp() / t)
}

/// `Δ_x(ψ ∗ φ_t^d)(x) / (ψ ∗ φ_t^d)(x)`.
///
/// Each density carries its own closed form; for the box the Laplacian is
/// moved onto the kernel, never onto the discontinuous ψ.
pub fn smoothed_laplacian_ratio(spec: &DensitySpec, t: f64, x: &[f64]) -> Result<f64> {
    check_time(t)?;
    check_spec_dim(spec, x)?;
    match spec {
        DensitySpec::ConstantOne | DensitySpec::Point => Ok(0.0),
        DensitySpec::GaussianDiag { sigmas } => Ok(sigmas
            .iter()
            .zip(x)
            .map(|(s, &xi)| {
                let var = s * s + t;
                (xi * xi - var) / (var * var)
            })
            .sum()),
        DensitySpec::UniformBox { bounds } => bounds
            .iter()
            .zip(x)
            .map(|(&(a, b), &xi)| box_axis_ratio(a, b, t, xi))
            .sum(),
    }
}

/// `ln ρ_t^i(z)` for a single component.
pub fn log_component_rho(component: &ManifoldComponent, t: f64, z: &[f64]) -> Result<LogDensity> {
    check_time(t)?;
    check_point_dim(component.ambient_dim(), z)?;
    let (x, y) = component.split(z);
    let on = log_smoothed_density(component.density(), t, &x)?.value();
    Ok(LogDensity::new(on + ln_kernel(t, y.len(), sq_norm(&y))))
}

fn component_log_terms(model: &MixtureModel, t: f64, z: &[f64]) -> Result<Vec<f64>> {
    check_time(t)?;
    model.check_point(z)?;
    model
        .components()
        .iter()
        .zip(model.weights())
        .map(|(c, w)| Ok(w.ln() + log_component_rho(c, t, z)?.value()))
        .collect()
}

/// `ln ρ_t(z) = ln Σ λ_i ρ_t^i(z)`.
pub fn log_mixture_rho(model: &MixtureModel, t: f64, z: &[f64]) -> Result<LogDensity> {
    let terms = component_log_terms(model, t, z)?;
    Ok(LogDensity::new(log_sum_exp(&terms)))
}

/// True when `z` lies on the component's affine subspace at a point of
/// positive on-manifold density.
pub fn contains(component: &ManifoldComponent, z: &[f64]) -> bool {
    let (x, y) = component.split(z);
    y.iter().all(|&v| v == 0.0) && eval_psi(component.density(), &x) > 0.0
}

/// Bias of component `β_t^i` against its own `d − D`: `‖y‖²/t + t·ratio`.
fn component_bias(component: &ManifoldComponent, t: f64, z: &[f64]) -> Result<f64> {
    let (x, y) = component.split(z);
    match smoothed_laplacian_ratio(component.density(), t, &x) {
        Ok(ratio) => Ok(sq_norm(&y) / t + t * ratio),
        Err(Error::Diverged) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// β_t for a single component.
pub fn component_beta_t(component: &ManifoldComponent, t: f64, z: &[f64]) -> Result<BetaValue> {
    check_time(t)?;
    check_point_dim(component.ambient_dim(), z)?;
    let bias = component_bias(component, t, z)?;
    let base = component.dim() as f64 - component.ambient_dim() as f64;
    Ok(BetaValue {
        beta: base + bias,
        bias,
        diverged: !contains(component, z) || !bias.is_finite(),
    })
}

/// Mixture β_t with the responsibilities `w_i = λ_i ρ_t^i / ρ_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureBeta {
    pub value: BetaValue,
    pub responsibilities: Vec<f64>,
    pub log_rho: LogDensity,
    /// Dimension the bias is measured against.
    pub reference_dim: usize,
}

/// The dimension β(z) reports: the smallest intrinsic dimension among
/// components containing `z`, or the model's smallest dimension when `z`
/// lies on none of them.
pub fn reference_dim(model: &MixtureModel, z: &[f64]) -> usize {
    model
        .components()
        .iter()
        .filter(|c| contains(c, z))
        .map(|c| c.dim())
        .min()
        .unwrap_or_else(|| model.min_dim())
}

/// Mixture β_t with the bias measured against [`reference_dim`].
pub fn mixture_beta_t(model: &MixtureModel, t: f64, z: &[f64]) -> Result<MixtureBeta> {
    model.check_point(z)?;
    mixture_beta_t_with_reference(model, t, z, reference_dim(model, z))
}

/// Mixture β_t, `β_t = Σ w_i β_t^i`, with bias against `d_ref − D`.
pub fn mixture_beta_t_with_reference(
    model: &MixtureModel,
    t: f64,
    z: &[f64],
    d_ref: usize,
) -> Result<MixtureBeta> {
    let terms = component_log_terms(model, t, z)?;
    let log_rho = log_sum_exp(&terms);
    let ambient = model.ambient_dim() as f64;
    let base = d_ref as f64 - ambient;
    let on_support = model.components().iter().any(|c| contains(c, z));
    if log_rho == f64::NEG_INFINITY {
        return Ok(MixtureBeta {
            value: BetaValue {
                beta: f64::INFINITY,
                bias: f64::INFINITY,
                diverged: true,
            },
            responsibilities: vec![0.0; terms.len()],
            log_rho: LogDensity::new(log_rho),
            reference_dim: d_ref,
        });
    }
    let responsibilities: Vec<f64> = terms.iter().map(|l| (l - log_rho).exp()).collect();
    let mut bias = 0.0;
    for (c, &w) in model.components().iter().zip(&responsibilities) {
        if w == 0.0 {
            continue;
        }
        let shift = c.dim() as f64 - d_ref as f64;
        bias += w * (shift + component_bias(c, t, z)?);
    }
    Ok(MixtureBeta {
        value: BetaValue {
            beta: base + bias,
            bias,
            diverged: !on_support || !bias.is_finite(),
        },
        responsibilities,
        log_rho: LogDensity::new(log_rho),
        reference_dim: d_ref,
    })
}

/// Closed form for two parallel copies of the same density at distance
/// `‖v‖`, evaluated on the first copy:
///
/// ```text
/// β_t = base + λ‖v‖² / (t · ((1−λ) e^{‖v‖²/2t} + λ))
/// ```
///
/// `lambda` is the weight of the other copy. The bias is reported against
/// `base_beta`.
pub fn parallel_planes_beta(t: f64, lambda: f64, v_norm: f64, base_beta: f64) -> Result<BetaValue> {
    check_time(t)?;
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidArgument(format!("lambda {lambda} outside (0, 1)")));
    }
    if !(v_norm > 0.0 && v_norm.is_finite()) {
        return Err(Error::InvalidArgument(format!("offset norm {v_norm} must be positive")));
    }
    let exponent = v_norm * v_norm / (2.0 * t);
    let ln_den = log_sum_exp(&[(1.0 - lambda).ln() + exponent, lambda.ln()]);
    let correction = (lambda.ln() + 2.0 * v_norm.ln() - t.ln() - ln_den).exp();
    Ok(BetaValue {
        beta: base_beta + correction,
        bias: correction,
        diverged: false,
    })
}

/// Upper bound on the responsibility of a component whose support avoids
/// `B(x, R)` when another component puts mass `C` inside `B(x, r)`:
///
/// ```text
/// λ_i / (λ_i + C λ_j e^{(R² − r²)/2t})
/// ```
pub fn coefficient_bound(
    lambda_i: f64,
    lambda_j: f64,
    mass: f64,
    outer_radius: f64,
    inner_radius: f64,
    t: f64,
) -> Result<f64> {
    check_time(t)?;
    if !(lambda_i > 0.0 && lambda_j > 0.0) {
        return Err(Error::InvalidArgument("weights must be positive".into()));
    }
    if !(mass > 0.0 && mass <= 1.0) {
        return Err(Error::InvalidArgument(format!("mass {mass} outside (0, 1]")));
    }
    if !(inner_radius > 0.0 && outer_radius > inner_radius && outer_radius.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "radii must satisfy R > r > 0, got R={outer_radius}, r={inner_radius}"
        )));
    }
    let a = (mass * lambda_j / lambda_i).ln()
        + (outer_radius * outer_radius - inner_radius * inner_radius) / (2.0 * t);
    Ok(if a > 0.0 {
        let e = (-a).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + a.exp())
    })
}

/// β(z) = lim_{t→0} β_t(z).
///
/// The lowest-dimensional component containing `z` dominates the
/// responsibilities, so the limit is `d_min − D`. Points off every
/// component diverge.
pub fn beta_limit(model: &MixtureModel, z: &[f64]) -> Result<BetaValue> {
    model.check_point(z)?;
    let d_min = model
        .components()
        .iter()
        .filter(|c| contains(c, z))
        .map(|c| c.dim())
        .min();
    Ok(match d_min {
        Some(d) => BetaValue {
            beta: d as f64 - model.ambient_dim() as f64,
            bias: 0.0,
            diverged: false,
        },
        None => BetaValue {
            beta: f64::INFINITY,
            bias: f64::INFINITY,
            diverged: true,
        },
    })
}
