//! The LIDL regression and bias curves.
//!
//! LIDL regresses `ln ρ_t(z)` on `ln δ` with `δ = √t`; the slope tends to
//! `d − D`, so `D + slope` estimates the local intrinsic dimension.

use serde::Serialize;

use crate::analytic::{contains, log_mixture_rho, mixture_beta_t_with_reference, reference_dim};
use crate::error::{Error, Result};
use crate::model::MixtureModel;
use crate::oracle::{rho_monte_carlo, rho_quadrature, McSettings, QuadratureSettings};

/// Strictly increasing diffusion times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeGrid {
    values: Vec<f64>,
}

impl TimeGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidGrid("grid is empty".into()));
        }
        if values.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::InvalidGrid("times must be positive and finite".into()));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("times must be strictly increasing".into()));
        }
        Ok(TimeGrid { values })
    }

    /// `10^(log10 t_min + k / per_decade)` up to `t_max`; `t_max` is appended
    /// when it does not fall on the lattice.
    pub fn log_spaced(t_min: f64, t_max: f64, per_decade: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_min.is_finite() && t_max.is_finite() && t_max > t_min) {
            return Err(Error::InvalidGrid(format!(
                "need 0 < t_min < t_max, got [{t_min}, {t_max}]"
            )));
        }
        if per_decade == 0 {
            return Err(Error::InvalidGrid("per_decade must be positive".into()));
        }
        let lo = t_min.log10();
        let span = t_max.log10() - lo;
        let steps = (span * per_decade as f64 + 1e-9).floor() as usize;
        let mut values: Vec<f64> = (0..=steps)
            .map(|k| 10f64.powf(lo + k as f64 / per_decade as f64))
            .collect();
        values[0] = t_min;
        let last = values[values.len() - 1];
        if (last - t_max).abs() <= 1e-12 * t_max {
            let n = values.len();
            values[n - 1] = t_max;
        } else if last < t_max {
            values.push(t_max);
        }
        Self::new(values)
    }

    /// Seven times `t_center · 10^(j/7)`, `j = −3..=3`.
    pub fn centered(t_center: f64) -> Result<Self> {
        if !(t_center > 0.0 && t_center.is_finite()) {
            return Err(Error::InvalidGrid(format!("t_center {t_center} must be positive")));
        }
        Self::new((-3..=3).map(|j| t_center * 10f64.powf(j as f64 / 7.0)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `δ_i = √t_i`.
    pub fn deltas(&self) -> Vec<f64> {
        self.values.iter().map(|t| t.sqrt()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LidlFit {
    pub slope: f64,
    pub intercept: f64,
    pub lid_estimate: f64,
    pub residual_rms: f64,
}

/// Ordinary least squares of `log_rho` on `log_delta`.
pub fn lidl_fit(samples: &[(f64, f64)], ambient_dim: usize) -> Result<LidlFit> {
    let n = samples.len() as f64;
    if samples.len() < 2 || samples.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::DegenerateRegression);
    }
    let mean_x = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let mean_y = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let sxx: f64 = samples.iter().map(|s| (s.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateRegression);
    }
    let sxy: f64 = samples.iter().map(|s| (s.0 - mean_x) * (s.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss: f64 = samples
        .iter()
        .map(|s| (s.1 - intercept - slope * s.0).powi(2))
        .sum();
    Ok(LidlFit {
        slope,
        intercept,
        lid_estimate: ambient_dim as f64 + slope,
        residual_rms: (ss / n).sqrt(),
    })
}

/// Regression abscissa. `Delta` is `ln √t`; `T` regresses on `ln t`, which
/// halves the slope and reproduces the squared-δ mistake.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Abscissa {
    Delta,
    T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensitySource {
    Analytic,
    Quadrature(QuadratureSettings),
    /// Each grid point uses its own stream derived from the seed.
    MonteCarlo(McSettings),
}

impl DensitySource {
    pub fn name(&self) -> &'static str {
        match self {
            DensitySource::Analytic => "analytic",
            DensitySource::Quadrature(_) => "quadrature",
            DensitySource::MonteCarlo(_) => "monte_carlo",
        }
    }
}

/// Sub-seed for grid point `index` (splitmix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut x = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LidEstimate {
    pub fit: LidlFit,
    pub source: &'static str,
    pub abscissa: Abscissa,
    pub times: Vec<f64>,
    pub log_rho: Vec<f64>,
    /// Per-point uncertainty of `log_rho` (zero for the closed form).
    pub log_rho_error: Vec<f64>,
    /// Standard error of the slope propagated from `log_rho_error`.
    pub slope_error: f64,
    /// `z` lies on no component: β_t diverges and the estimate exceeds `D`.
    pub off_manifold: bool,
}

pub fn estimate_lid(
    model: &MixtureModel,
    z: &[f64],
    grid: &TimeGrid,
    source: &DensitySource,
) -> Result<LidEstimate> {
    estimate_lid_with(model, z, grid, source, Abscissa::Delta)
}

pub fn estimate_lid_with(
    model: &MixtureModel,
    z: &[f64],
    grid: &TimeGrid,
    source: &DensitySource,
    abscissa: Abscissa,
) -> Result<LidEstimate> {
    model.check_point(z)?;
    let mut log_rho = Vec::with_capacity(grid.len());
    let mut log_rho_error = Vec::with_capacity(grid.len());
    for (i, &t) in grid.values().iter().enumerate() {
        let (value, error) = match source {
            DensitySource::Analytic => (log_mixture_rho(model, t, z)?.value(), 0.0),
            DensitySource::Quadrature(settings) => {
                let q = rho_quadrature(model, t, z, settings)?;
                (q.value, q.error_bound)
            }
            DensitySource::MonteCarlo(mc) => {
                let sub = McSettings {
                    samples: mc.samples,
                    seed: derive_seed(mc.seed, i as u64),
                };
                let est = rho_monte_carlo(model, t, z, &sub)?;
                if est.value <= 0.0 || est.value.is_nan() {
                    return Err(Error::Diverged);
                }
                (est.value.ln(), est.error_bound / est.value)
            }
        };
        log_rho.push(value);
        log_rho_error.push(error);
    }
    let xs: Vec<f64> = grid
        .values()
        .iter()
        .map(|t| match abscissa {
            Abscissa::Delta => 0.5 * t.ln(),
            Abscissa::T => t.ln(),
        })
        .collect();
    let samples: Vec<(f64, f64)> = xs.iter().copied().zip(log_rho.iter().copied()).collect();
    let fit = lidl_fit(&samples, model.ambient_dim())?;
    let mean_x = xs.iter().sum::<f64>() / xs.len() as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    let slope_error = xs
        .iter()
        .zip(&log_rho_error)
        .map(|(x, e)| ((x - mean_x) / sxx * e).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(LidEstimate {
        fit,
        source: source.name(),
        abscissa,
        times: grid.values().to_vec(),
        log_rho,
        log_rho_error,
        slope_error,
        off_manifold: !model.components().iter().any(|c| contains(c, z)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaRow {
    pub t: f64,
    pub log_rho: f64,
    pub beta: f64,
    pub bias: f64,
    pub diverged: bool,
    pub responsibilities: Vec<f64>,
}

/// β_t samples at one point; `bias = β_t − (reference_dim − D)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaCurve {
    pub point: Vec<f64>,
    pub ambient_dim: usize,
    pub reference_dim: usize,
    pub rows: Vec<BetaRow>,
}

impl BetaCurve {
    /// `D + β_t` per row.
    pub fn estimates(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| self.ambient_dim as f64 + r.beta)
            .collect()
    }
}

/// Evaluates the mixture β_t along the grid. Without `d_ref`, the bias is
/// measured against the smallest dimension among components containing `z`.
pub fn bias_curve(
    model: &MixtureModel,
    z: &[f64],
    grid: &TimeGrid,
    d_ref: Option<usize>,
) -> Result<BetaCurve> {
    model.check_point(z)?;
    let d_ref = d_ref.unwrap_or_else(|| reference_dim(model, z));
    if d_ref > model.ambient_dim() {
        return Err(Error::InvalidArgument(format!(
            "reference dimension {d_ref} exceeds ambient dimension {}",
            model.ambient_dim()
        )));
    }
    let rows = grid
        .values()
        .iter()
        .map(|&t| {
            let m = mixture_beta_t_with_reference(model, t, z, d_ref)?;
            Ok(BetaRow {
                t,
                log_rho: m.log_rho.value(),
                beta: m.value.beta,
                bias: m.value.bias,
                diverged: m.value.diverged,
                responsibilities: m.responsibilities,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BetaCurve {
        point: z.to_vec(),
        ambient_dim: model.ambient_dim(),
        reference_dim: d_ref,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use proptest::prelude::*;

    #[test]
    fn exact_line_is_reproduced() {
        let samples: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, -2.0 * i as f64 + 5.0)).collect();
        let fit = lidl_fit(&samples, 3).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-14);
        assert!((fit.intercept - 5.0).abs() < 1e-14);
        assert!(fit.residual_rms < 1e-14);
        assert!((fit.lid_estimate - 1.0).abs() < 1e-14);
        assert_eq!(fit.lid_estimate - fit.slope, 3.0);
    }

    #[test]
    fn degenerate_regressions_fail() {
        assert_eq!(lidl_fit(&[(1.0, 2.0), (1.0, 3.0)], 2), Err(Error::DegenerateRegression));
        assert_eq!(lidl_fit(&[(1.0, 2.0)], 2), Err(Error::DegenerateRegression));
    }

    #[test]
    fn grids() {
        let g = TimeGrid::log_spaced(1e-16, 1e2, 10).unwrap();
        assert_eq!(g.len(), 181);
        assert_eq!(g.values()[0], 1e-16);
        assert_eq!(g.values()[180], 1e2);
        assert!(g.values().contains(&1e-12));
        let g = TimeGrid::log_spaced(1e-3, 5.0, 1).unwrap();
        assert_eq!(g.values().last(), Some(&5.0));
        assert_eq!(g.len(), 5);
        let c = TimeGrid::centered(1e-9).unwrap();
        assert_eq!(c.len(), 7);
        assert!((c.values()[3] - 1e-9).abs() < 1e-24);
        assert!(TimeGrid::new(vec![1.0, 1.0]).is_err());
        assert!(TimeGrid::log_spaced(1.0, 0.1, 3).is_err());
    }

    #[test]
    fn gaussian_line_lid_is_one() {
        let model = catalog::gaussian_line();
        let grid = TimeGrid::log_spaced(1e-8, 1e-6, 2).unwrap();
        assert_eq!(grid.len(), 5);
        let est = estimate_lid(&model, &[0.0, 0.0], &grid, &DensitySource::Analytic).unwrap();
        assert!((est.fit.slope + 1.0).abs() < 0.01);
        assert!((est.fit.lid_estimate - 1.0).abs() < 0.01);
        assert!(!est.off_manifold);
    }

    #[test]
    fn uniform_interior_lid() {
        let model = MixtureModel::single(
            crate::ManifoldComponent::uniform_box(vec![(0.0, 1.0)], vec![]).unwrap(),
        )
        .unwrap();
        let grid = TimeGrid::log_spaced(1e-8, 1e-6, 2).unwrap();
        let est = estimate_lid(&model, &[0.5], &grid, &DensitySource::Analytic).unwrap();
        assert!((est.fit.lid_estimate - 1.0).abs() < 1e-3);
    }

    #[test]
    fn off_manifold_is_flagged() {
        let model = catalog::gaussian_line();
        let grid = TimeGrid::centered(1e-4).unwrap();
        let est = estimate_lid(&model, &[0.0, 0.5], &grid, &DensitySource::Analytic).unwrap();
        assert!(est.off_manifold);
        assert!(est.fit.lid_estimate > 2.0);
    }

    #[test]
    fn squared_delta_abscissa_halves_slope() {
        let model = catalog::gaussian_line();
        let grid = TimeGrid::centered(1e-9).unwrap();
        let z = [0.0, 0.0];
        let d = estimate_lid_with(&model, &z, &grid, &DensitySource::Analytic, Abscissa::Delta).unwrap();
        let t = estimate_lid_with(&model, &z, &grid, &DensitySource::Analytic, Abscissa::T).unwrap();
        assert!((d.fit.slope - 2.0 * t.fit.slope).abs() < 1e-12);
    }

    #[test]
    fn parabola_bias_at_origin() {
        let model = catalog::gaussian_line();
        let grid = TimeGrid::new(vec![0.01]).unwrap();
        let curve = bias_curve(&model, &[0.0, 0.0], &grid, None).unwrap();
        assert!((curve.rows[0].bias + 0.01 / 1.01).abs() < 1e-15);
        assert_eq!(curve.reference_dim, 1);
    }

    #[test]
    fn seeds_are_distinct() {
        let seeds: Vec<u64> = (0..100).map(|i| derive_seed(7, i)).collect();
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), seeds.len());
    }

    proptest! {
        #[test]
        fn shift_changes_only_intercept(
            ys in prop::collection::vec(-50.0f64..50.0, 3..12),
            c in -1e3f64..1e3,
        ) {
            let samples: Vec<(f64, f64)> = ys.iter().enumerate().map(|(i, y)| (i as f64 * 0.3 - 2.0, *y)).collect();
            let shifted: Vec<(f64, f64)> = samples.iter().map(|(x, y)| (*x, y + c)).collect();
            let a = lidl_fit(&samples, 2).unwrap();
            let b = lidl_fit(&shifted, 2).unwrap();
            prop_assert!((a.slope - b.slope).abs() <= 1e-12 * (1.0 + a.slope.abs()) * (1.0 + c.abs() / 50.0));
            prop_assert!((b.intercept - a.intercept - c).abs() < 1e-9);
        }

        #[test]
        fn slope_within_pairwise_range(
            pts in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 2..10),
        ) {
            let mut xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
            xs.sort_by(f64::total_cmp);
            prop_assume!(xs.windows(2).all(|w| w[1] - w[0] > 1e-3));
            let fit = lidl_fit(&pts, 1).unwrap();
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    let s = (pts[j].1 - pts[i].1) / (pts[j].0 - pts[i].0);
                    lo = lo.min(s);
                    hi = hi.max(s);
                }
            }
            prop_assert!(fit.slope >= lo - 1e-9 && fit.slope <= hi + 1e-9);
        }
    }
}
