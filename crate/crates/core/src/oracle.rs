//! Brute-force references for the closed forms.
//!
//! Nothing here calls the closed-form smoothed densities: the quadrature
//! integrates the raw kernel against ψ, the Monte Carlo estimator samples
//! the data distribution, and the finite-difference routines only touch
//! `log ρ_t` values.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::analytic::{log_mixture_rho, mixture_beta_t};
use crate::error::{check_time, Error, Result};
use crate::model::{eval_psi, DensitySpec, ManifoldComponent, MixtureModel};
use crate::special::{log_sum_exp, normal_sf};

/// Temporal relative step for [`beta_fd_time`].
pub const DEFAULT_TIME_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub nodes_per_axis: usize,
    /// Half-width of each axis window in units of the integrand's scale.
    pub truncation_radius: f64,
    pub max_dim: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            nodes_per_axis: 64,
            truncation_radius: 8.0,
            max_dim: 3,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_axis < 16 {
            return Err(Error::InvalidSettings(format!(
                "nodes_per_axis must be at least 16, got {}",
                self.nodes_per_axis
            )));
        }
        if !(self.truncation_radius > 0.0 && self.truncation_radius.is_finite()) {
            return Err(Error::InvalidSettings("truncation radius must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub samples: usize,
    pub seed: u64,
}

/// A reference value with an error bar: standard error for Monte Carlo,
/// rule-plus-truncation estimate for quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate {
    pub value: f64,
    pub error_bound: f64,
    /// Set when the error bar is a convention rather than an estimate
    /// (a single Monte Carlo sample).
    pub degenerate: bool,
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, refined by Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = x;
            nodes[n - 1 - i] = -x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[lo, hi]`.
    pub fn on_interval(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn ln_kernel_at(t: f64, ambient: usize, sq_dist: f64) -> f64 {
    -0.5 * ambient as f64 * (2.0 * PI * t).ln() - sq_dist / (2.0 * t)
}

/// Per-axis integration windows around the mass of `ψ(u) φ_t(x − u)`.
fn axis_windows(density: &DensitySpec, x: &[f64], t: f64, radius: f64) -> Vec<(f64, f64)> {
    match density {
        DensitySpec::Point => Vec::new(),
        DensitySpec::ConstantOne => x
            .iter()
            .map(|&xi| (xi - radius * t.sqrt(), xi + radius * t.sqrt()))
            .collect(),
        DensitySpec::GaussianDiag { sigmas } => sigmas
            .iter()
            .zip(x)
            .map(|(s, &xi)| {
                let var = s * s;
                let centre = xi * var / (var + t);
                let width = (var * t / (var + t)).sqrt();
                (centre - radius * width, centre + radius * width)
            })
            .collect(),
        DensitySpec::UniformBox { bounds } => bounds
            .iter()
            .zip(x)
            .map(|(&(a, b), &xi)| {
                // Sub-level set of the kernel exponent relative to its
                // maximum over [a, b].
                let nearest = xi.clamp(a, b);
                let reach = ((xi - nearest).powi(2) + radius * radius * t).sqrt();
                ((xi - reach).max(a), (xi + reach).min(b))
            })
            .collect(),
    }
}

/// `ln ∫ φ_t^D(z − (u, v)) ψ(u) du` by tensor Gauss–Legendre.
fn component_log_integral(
    component: &ManifoldComponent,
    t: f64,
    z: &[f64],
    rule: &GaussLegendre,
    radius: f64,
) -> f64 {
    let d = component.dim();
    let ambient = component.ambient_dim();
    let normal_sq: f64 = z[d..]
        .iter()
        .zip(component.offset())
        .map(|(a, v)| (a - v).powi(2))
        .sum();
    if d == 0 {
        return ln_kernel_at(t, ambient, normal_sq);
    }
    let windows = axis_windows(component.density(), &z[..d], t, radius);
    let axes: Vec<Vec<(f64, f64)>> = windows
        .iter()
        .map(|&(lo, hi)| rule.on_interval(lo, hi).collect())
        .collect();
    let n = rule.len();
    let total = n.pow(d as u32);
    let mut terms = Vec::with_capacity(total);
    let mut u = vec![0.0; d];
    for flat in 0..total {
        let mut rest = flat;
        let mut ln_w = 0.0;
        let mut sq = normal_sq;
        for axis in 0..d {
            let (node, w) = axes[axis][rest % n];
            rest /= n;
            u[axis] = node;
            ln_w += w.ln();
            sq += (z[axis] - node).powi(2);
        }
        let psi = eval_psi(component.density(), &u);
        if psi > 0.0 {
            terms.push(ln_w + psi.ln() + ln_kernel_at(t, ambient, sq));
        }
    }
    log_sum_exp(&terms)
}

/// Quadrature estimate of `ln ρ_t(z)`.
///
/// Each component's integral runs over a window of `truncation_radius`
/// scale units around the integrand's mass; point masses are evaluated
/// exactly. The error bound adds the change against a half-size rule to the
/// Gaussian mass left outside the windows.
pub fn rho_quadrature(
    model: &MixtureModel,
    t: f64,
    z: &[f64],
    settings: &QuadratureSettings,
) -> Result<OracleEstimate> {
    check_time(t)?;
    settings.validate()?;
    model.check_point(z)?;
    if let Some(c) = model.components().iter().find(|c| c.dim() > settings.max_dim) {
        return Err(Error::QuadratureDim {
            dim: c.dim(),
            max: settings.max_dim,
        });
    }
    let fine = GaussLegendre::new(settings.nodes_per_axis);
    let coarse = GaussLegendre::new(settings.nodes_per_axis / 2);
    let mixture = |rule: &GaussLegendre| {
        let terms: Vec<f64> = model
            .components()
            .iter()
            .zip(model.weights())
            .map(|(c, w)| w.ln() + component_log_integral(c, t, z, rule, settings.truncation_radius))
            .collect();
        log_sum_exp(&terms)
    };
    let value = mixture(&fine);
    let rule_error = (value - mixture(&coarse)).abs();
    let max_dim = model.components().iter().map(|c| c.dim()).max().unwrap_or(0);
    let truncation = 2.0 * max_dim as f64 * normal_sf(settings.truncation_radius);
    Ok(OracleEstimate {
        value,
        error_bound: if rule_error.is_finite() { rule_error + truncation } else { f64::INFINITY },
        degenerate: false,
    })
}

/// Monte Carlo estimate of `ρ_t(z)` (linear scale): draws `y ~ p_S` and
/// averages `φ_t^D(z − y)`. Deterministic for a fixed seed.
pub fn rho_monte_carlo(
    model: &MixtureModel,
    t: f64,
    z: &[f64],
    mc: &McSettings,
) -> Result<OracleEstimate> {
    check_time(t)?;
    model.check_point(z)?;
    if mc.samples == 0 {
        return Err(Error::InvalidSettings("Monte Carlo needs at least one sample".into()));
    }
    if model.is_improper() {
        return Err(Error::ImproperSampling);
    }
    let ambient = model.ambient_dim();
    let mut cumulative = Vec::with_capacity(model.len());
    let mut acc = 0.0;
    for w in model.weights() {
        acc += w;
        cumulative.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
    let (mut mean, mut m2) = (0.0f64, 0.0f64);
    for k in 0..mc.samples {
        let r: f64 = rng.random::<f64>() * acc;
        let index = cumulative.iter().position(|&c| r < c).unwrap_or(model.len() - 1);
        let component = &model.components()[index];
        let d = component.dim();
        let mut sq = 0.0;
        match component.density() {
            DensitySpec::GaussianDiag { sigmas } => {
                for (i, s) in sigmas.iter().enumerate() {
                    let g: f64 = rng.sample(StandardNormal);
                    sq += (z[i] - s * g).powi(2);
                }
            }
            DensitySpec::UniformBox { bounds } => {
                for (i, &(a, b)) in bounds.iter().enumerate() {
                    let u = a + (b - a) * rng.random::<f64>();
                    sq += (z[i] - u).powi(2);
                }
            }
            DensitySpec::Point => {}
            DensitySpec::ConstantOne => return Err(Error::ImproperSampling),
        }
        sq += z[d..]
            .iter()
            .zip(component.offset())
            .map(|(a, v)| (a - v).powi(2))
            .sum::<f64>();
        let value = ln_kernel_at(t, ambient, sq).exp();
        let delta = value - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (value - mean);
    }
    let n = mc.samples as f64;
    let (error_bound, degenerate) = if mc.samples == 1 {
        (0.0, true)
    } else {
        ((m2 / (n - 1.0) / n).sqrt(), false)
    };
    Ok(OracleEstimate {
        value: mean,
        error_bound,
        degenerate,
    })
}

/// Plain central-difference Laplacian `Σ_j [f(z+h e_j) − 2f(z) + f(z−h e_j)] / h²`.
pub fn laplacian_fd(field: impl Fn(&[f64]) -> f64, z: &[f64], h: f64) -> Result<f64> {
    check_step(h)?;
    let centre = field(z);
    let mut probe = z.to_vec();
    let mut acc = 0.0;
    for j in 0..z.len() {
        probe[j] = z[j] + h;
        let plus = field(&probe);
        probe[j] = z[j] - h;
        let minus = field(&probe);
        probe[j] = z[j];
        acc += plus - 2.0 * centre + minus;
    }
    Ok(acc / (h * h))
}

/// `Δf(z) / f(z)` from central differences of `ln f`, combined through
/// `expm1` so that neither underflow nor cancellation of `f` matters.
pub fn laplacian_ratio_fd(log_field: impl Fn(&[f64]) -> Result<f64>, z: &[f64], h: f64) -> Result<f64> {
    check_step(h)?;
    let centre = log_field(z)?;
    let mut probe = z.to_vec();
    let mut acc = 0.0;
    for j in 0..z.len() {
        probe[j] = z[j] + h;
        let plus = log_field(&probe)?;
        probe[j] = z[j] - h;
        let minus = log_field(&probe)?;
        probe[j] = z[j];
        acc += (plus - centre).exp_m1() + (minus - centre).exp_m1();
    }
    Ok(acc / (h * h))
}

fn check_step(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("step {h} must be positive")))
    }
}

/// Spatial step `1e-4 · ℓ` where `ℓ = √t · min(1, √t / r)` and `r` is the
/// distance from `z` to the nearest component's affine subspace. `√t` is
/// the smallest length scale of `ρ_t` on a component; off it, `ln ρ_t`
/// bends on the scale `t / r`.
pub fn default_spatial_step(model: &MixtureModel, t: f64, z: &[f64]) -> f64 {
    let r = model
        .components()
        .iter()
        .map(|c| {
            z[c.dim()..]
                .iter()
                .zip(c.offset())
                .map(|(a, v)| (a - v).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .fold(f64::INFINITY, f64::min);
    let root = t.sqrt();
    1e-4 * root * if r > root { root / r } else { 1.0 }
}

/// `2t · ∂_t ln ρ_t(z)` by a central difference in `t` with relative step
/// `h_rel`.
pub fn beta_fd_time(model: &MixtureModel, z: &[f64], t: f64, h_rel: f64) -> Result<f64> {
    check_time(t)?;
    if !(h_rel > 0.0 && h_rel < 1.0) {
        return Err(Error::InvalidArgument(format!("relative step {h_rel} outside (0, 1)")));
    }
    let plus = log_mixture_rho(model, t * (1.0 + h_rel), z)?.value();
    let minus = log_mixture_rho(model, t * (1.0 - h_rel), z)?.value();
    Ok((plus - minus) / h_rel)
}

/// `t · Δρ_t(z) / ρ_t(z)` from spatial central differences of `ln ρ_t`.
pub fn beta_fd_space(model: &MixtureModel, z: &[f64], t: f64, h: f64) -> Result<f64> {
    check_time(t)?;
    let ratio = laplacian_ratio_fd(|p| Ok(log_mixture_rho(model, t, p)?.value()), z, h)?;
    Ok(t * ratio)
}

/// A positive function of `t` observed through `ln f(t)` and `t f'(t)/f(t)`.
pub trait PowerLawCurve {
    fn ln_value(&self, t: f64) -> Result<f64>;
    /// `t f'(t) / f(t)`.
    fn log_derivative(&self, t: f64) -> Result<f64>;
}

/// `t ↦ ρ_t(z)` for a fixed model and point; its log-derivative is `β_t/2`.
pub struct DiffusedDensity<'a> {
    pub model: &'a MixtureModel,
    pub point: &'a [f64],
}

impl PowerLawCurve for DiffusedDensity<'_> {
    fn ln_value(&self, t: f64) -> Result<f64> {
        Ok(log_mixture_rho(self.model, t, self.point)?.value())
    }

    fn log_derivative(&self, t: f64) -> Result<f64> {
        Ok(0.5 * mixture_beta_t(self.model, t, self.point)?.value.beta)
    }
}

/// `f(t) = t^{−α}`.
pub struct PowerLaw {
    pub alpha: f64,
}

impl PowerLawCurve for PowerLaw {
    fn ln_value(&self, t: f64) -> Result<f64> {
        Ok(-self.alpha * t.ln())
    }

    fn log_derivative(&self, _t: f64) -> Result<f64> {
        Ok(-self.alpha)
    }
}

/// One entry of [`asymptotic_slope_pair`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopePair {
    pub t: f64,
    /// Raw `ln f(t) / ln t`.
    pub log_ratio: f64,
    /// Secant slope of `ln f` against `ln t` between this entry and its
    /// predecessor (the first entry pairs with its successor). By
    /// Stolz–Cesàro it shares the limit of `ln f / ln t` but without the
    /// `O(1/|ln t|)` offset.
    pub cond3_slope: f64,
    /// `t f'(t) / f(t)`.
    pub cond4_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeSequence {
    pub pairs: Vec<SlopePair>,
    /// Over the last three entries `|t f'/f|` grows at least like `t^{-1/2}`,
    /// the signature of an off-manifold point (where it grows like `1/t`).
    pub diverging: bool,
}

/// Evaluates the log-log slope and the logarithmic derivative along a
/// strictly decreasing sequence of times.
pub fn asymptotic_slope_pair(curve: &impl PowerLawCurve, times: &[f64]) -> Result<SlopeSequence> {
    if times.len() < 3 {
        return Err(Error::InvalidGrid("need at least three times".into()));
    }
    for &t in times {
        check_time(t)?;
    }
    if times.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidGrid("times must be strictly decreasing".into()));
    }
    let logs: Vec<f64> = times
        .iter()
        .map(|&t| curve.ln_value(t))
        .collect::<Result<_>>()?;
    let mut pairs = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        let (i, j) = if k == 0 { (0, 1) } else { (k - 1, k) };
        let cond3_slope = (logs[j] - logs[i]) / (times[j].ln() - times[i].ln());
        pairs.push(SlopePair {
            t,
            log_ratio: logs[k] / t.ln(),
            cond3_slope,
            cond4_value: curve.log_derivative(t)?,
        });
    }
    let tail = &pairs[pairs.len() - 3..];
    let diverging = tail.windows(2).all(|w| {
        w[1].cond4_value.abs() >= w[0].cond4_value.abs() * (w[0].t / w[1].t).sqrt()
    });
    Ok(SlopeSequence { pairs, diverging })
}
