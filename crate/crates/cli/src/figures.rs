//! Built-in figure configurations.

use clap::ValueEnum;
use heatlid::catalog;
use heatlid::estimator::{bias_curve, BetaCurve, TimeGrid};
use heatlid::MixtureModel;
use serde_json::json;

use crate::svg::{Plot, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureName {
    /// Bias of the Gaussian line against x, one curve per t.
    Parabola,
    /// D + β_t for a Gaussian with scales 1, 1e-3, 1e-6 against t.
    Stairs,
    /// Bias of U(0,1) against x, one curve per t.
    Uniform,
    /// Bias on one of two parallel lines at distance 1 against t.
    Parallel,
}

/// Overrides for the default grids.
#[derive(Debug, Clone, Default)]
pub struct GridOverrides {
    pub times: Option<Vec<f64>>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub per_decade: Option<usize>,
}

pub struct Figure {
    pub model: MixtureModel,
    pub grid: serde_json::Value,
    pub curves: Vec<BetaCurve>,
    pub plot: Plot,
}

const SPATIAL_TIMES: [f64; 5] = [1e-4, 1e-3, 1e-2, 1e-1, 1.0];
const SPATIAL_POINTS: usize = 401;

/// `a + (b − a)·k/(n − 1)` for `k = 0..n`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
        .collect()
}

pub fn build(name: FigureName, overrides: &GridOverrides) -> heatlid::Result<Figure> {
    match name {
        FigureName::Parabola => spatial(
            catalog::gaussian_line(),
            (-3.0, 3.0),
            overrides,
            "Bias of the LIDL estimate, Gaussian line",
        ),
        FigureName::Uniform => spatial(
            catalog::uniform_interval(),
            (-0.25, 1.25),
            overrides,
            "Bias of the LIDL estimate, U(0,1)",
        ),
        FigureName::Stairs => stairs(overrides),
        FigureName::Parallel => parallel(overrides),
    }
}

fn spatial(
    model: MixtureModel,
    (a, b): (f64, f64),
    overrides: &GridOverrides,
    title: &str,
) -> heatlid::Result<Figure> {
    let times = overrides.times.clone().unwrap_or_else(|| SPATIAL_TIMES.to_vec());
    let grid = TimeGrid::new(times)?;
    let xs = linspace(a, b, SPATIAL_POINTS);
    let curves = xs
        .iter()
        .map(|&x| bias_curve(&model, &[x, 0.0], &grid, Some(1)))
        .collect::<heatlid::Result<Vec<_>>>()?;
    let series = grid
        .values()
        .iter()
        .enumerate()
        .map(|(j, t)| Series {
            label: format!("t = {t:e}"),
            points: curves
                .iter()
                .map(|c| {
                    let row = &c.rows[j];
                    (c.point[0], if row.diverged { f64::NAN } else { row.bias })
                })
                .collect(),
        })
        .collect();
    Ok(Figure {
        model,
        grid: json!({ "x_min": a, "x_max": b, "x_points": SPATIAL_POINTS, "times": grid.values() }),
        curves,
        plot: Plot {
            title: title.into(),
            x_label: "x".into(),
            y_label: "bias".into(),
            log_x: false,
            series,
        },
    })
}

fn log_grid(overrides: &GridOverrides, t_min: f64, t_max: f64, per_decade: usize) -> heatlid::Result<TimeGrid> {
    match &overrides.times {
        Some(times) => TimeGrid::new(times.clone()),
        None => TimeGrid::log_spaced(
            overrides.t_min.unwrap_or(t_min),
            overrides.t_max.unwrap_or(t_max),
            overrides.per_decade.unwrap_or(per_decade),
        ),
    }
}

fn stairs(overrides: &GridOverrides) -> heatlid::Result<Figure> {
    let model = catalog::stairs();
    let grid = log_grid(overrides, 1e-16, 1e2, 10)?;
    let curves = [0.0, 1e-6, 2e-6]
        .iter()
        .map(|&x3| bias_curve(&model, &[0.0, 0.0, x3], &grid, Some(3)))
        .collect::<heatlid::Result<Vec<_>>>()?;
    let series = curves
        .iter()
        .map(|c| Series {
            label: format!("x3 = {:e}", c.point[2]),
            points: grid.values().iter().copied().zip(c.estimates()).collect(),
        })
        .collect();
    Ok(Figure {
        model,
        grid: json!({ "times": grid.values(), "x3": [0.0, 1e-6, 2e-6] }),
        curves,
        plot: Plot {
            title: "LIDL estimate D + beta_t, Gaussian with scales 1, 1e-3, 1e-6".into(),
            x_label: "t".into(),
            y_label: "estimate".into(),
            log_x: true,
            series,
        },
    })
}

fn parallel(overrides: &GridOverrides) -> heatlid::Result<Figure> {
    let model = catalog::parallel_lines();
    let grid = log_grid(overrides, 1e-3, 1e2, 10)?;
    let curve = bias_curve(&model, &[0.0, 0.0], &grid, Some(1))?;
    let series = vec![Series {
        label: "|v| = 1".into(),
        points: curve.rows.iter().map(|r| (r.t, r.bias)).collect(),
    }];
    Ok(Figure {
        model,
        grid: json!({ "times": grid.values() }),
        curves: vec![curve],
        plot: Plot {
            title: "Bias on one of two parallel lines".into(),
            x_label: "t".into(),
            y_label: "bias".into(),
            log_x: true,
            series,
        },
    })
}
