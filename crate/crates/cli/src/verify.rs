//! Oracle agreement suites behind `heatlid verify`.

use clap::ValueEnum;
use heatlid::analytic::{
    coefficient_bound, log_mixture_rho, log_smoothed_density, mixture_beta_t, parallel_planes_beta,
    smoothed_laplacian_ratio,
};
use heatlid::catalog;
use heatlid::estimator::{bias_curve, TimeGrid};
use heatlid::oracle::{
    asymptotic_slope_pair, beta_fd_space, beta_fd_time, default_spatial_step, laplacian_ratio_fd,
    rho_quadrature, DiffusedDensity, PowerLaw, QuadratureSettings, DEFAULT_TIME_STEP,
};
use heatlid::{DensitySpec, MixtureModel, Result};

use crate::figures::linspace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Heat,
    Laplacian,
    Mixture,
    Slopes,
    All,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub max_error: f64,
    pub tolerance: f64,
    /// Where the largest error occurred.
    pub worst: String,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

/// Running maximum that remembers its location. NaN counts as infinite.
struct Worst {
    error: f64,
    at: String,
}

impl Worst {
    fn new() -> Self {
        Worst {
            error: 0.0,
            at: String::from("-"),
        }
    }

    fn update(&mut self, error: f64, at: impl FnOnce() -> String) {
        let error = if error.is_nan() { f64::INFINITY } else { error };
        if error > self.error || (self.at == "-" && error == self.error) {
            self.error = error;
            self.at = at();
        }
    }

    fn check(self, suite: &'static str, name: &'static str, tolerance: f64) -> Check {
        Check {
            suite,
            name,
            max_error: self.error,
            tolerance,
            worst: self.at,
        }
    }
}

pub const HEAT_TIMES: [f64; 4] = [1e-4, 1e-2, 1.0, 10.0];

pub fn run(suite: Suite) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    if matches!(suite, Suite::Heat | Suite::All) {
        checks.extend(heat()?);
    }
    if matches!(suite, Suite::Laplacian | Suite::All) {
        checks.extend(laplacian()?);
    }
    if matches!(suite, Suite::Mixture | Suite::All) {
        checks.extend(mixture()?);
    }
    if matches!(suite, Suite::Slopes | Suite::All) {
        checks.extend(slopes()?);
    }
    Ok(checks)
}

fn heat() -> Result<Vec<Check>> {
    let mut closed = Worst::new();
    let mut cross = Worst::new();
    for entry in catalog::all() {
        for z in &entry.points {
            for t in HEAT_TIMES {
                let beta = mixture_beta_t(&entry.model, t, z)?.value.beta;
                let fd_t = beta_fd_time(&entry.model, z, t, DEFAULT_TIME_STEP)?;
                let fd_x = beta_fd_space(&entry.model, z, t, default_spatial_step(&entry.model, t, z))?;
                let scale = beta.abs().max(1.0);
                let at = || format!("{} z={z:?} t={t:e}", entry.name);
                closed.update((fd_t - beta).abs() / scale, at);
                cross.update((fd_t - fd_x).abs() / scale, at);
            }
        }
    }
    Ok(vec![
        closed.check("heat", "2t d(log rho)/dt vs closed-form beta", 1e-4),
        cross.check("heat", "time vs space finite differences", 1e-3),
    ])
}

/// Densities and evaluation points for the Laplacian suite.
pub fn laplacian_cases() -> Vec<(&'static str, DensitySpec, Vec<Vec<f64>>)> {
    vec![
        (
            "gaussian d=1",
            DensitySpec::GaussianDiag { sigmas: vec![1.0] },
            vec![vec![0.0], vec![0.7], vec![-2.0]],
        ),
        (
            "gaussian d=2",
            DensitySpec::GaussianDiag { sigmas: vec![1.0, 0.5] },
            vec![vec![0.0, 0.0], vec![0.3, -0.8], vec![1.5, 1.0]],
        ),
        (
            "gaussian d=3",
            DensitySpec::GaussianDiag { sigmas: vec![1.0, 0.5, 2.0] },
            vec![vec![0.0, 0.0, 0.0], vec![0.3, -0.8, 1.0], vec![2.0, 0.1, -3.0]],
        ),
        (
            "box d=1",
            DensitySpec::UniformBox { bounds: vec![(0.0, 1.0)] },
            vec![vec![0.5], vec![0.05], vec![1.3]],
        ),
        (
            "box d=2",
            DensitySpec::UniformBox { bounds: vec![(0.0, 1.0), (0.0, 2.0)] },
            vec![vec![0.5, 1.0], vec![0.05, 1.9], vec![1.3, -0.2]],
        ),
        (
            "box d=3",
            DensitySpec::UniformBox { bounds: vec![(0.0, 1.0), (-1.0, 1.0), (0.0, 0.5)] },
            vec![vec![0.5, 0.0, 0.25], vec![0.05, 0.9, 0.45], vec![1.3, -1.2, 0.6]],
        ),
        ("constant d=2", DensitySpec::ConstantOne, vec![vec![0.0, 0.0], vec![3.0, -1.0]]),
    ]
}

pub const LAPLACIAN_TIMES: [f64; 3] = [0.05, 0.5, 2.0];

/// FD step: `1e-4` of the smallest length scale, shrunk off the support of
/// a box where `ln ψ∗φ` bends on the scale `t / distance`.
pub fn laplacian_step(spec: &DensitySpec, t: f64, x: &[f64]) -> f64 {
    let root = t.sqrt();
    let scale = match spec {
        DensitySpec::GaussianDiag { sigmas } => {
            let s = sigmas.iter().copied().fold(f64::INFINITY, f64::min);
            (s * s + t).sqrt()
        }
        DensitySpec::UniformBox { bounds } => {
            let r = bounds
                .iter()
                .zip(x)
                .map(|(&(a, b), &xi)| (xi - xi.clamp(a, b)).powi(2))
                .sum::<f64>()
                .sqrt();
            if r > root {
                root * root / r
            } else {
                root
            }
        }
        _ => root,
    };
    1e-4 * scale
}

/// Relative error of the FD Laplacian ratio, floored at 1 in the denominator.
pub fn laplacian_error(spec: &DensitySpec, t: f64, x: &[f64]) -> Result<f64> {
    let exact = smoothed_laplacian_ratio(spec, t, x)?;
    let h = laplacian_step(spec, t, x);
    let fd = laplacian_ratio_fd(|p| Ok(log_smoothed_density(spec, t, p)?.value()), x, h)?;
    Ok((fd - exact).abs() / exact.abs().max(1.0))
}

fn laplacian() -> Result<Vec<Check>> {
    let mut worst = Worst::new();
    for (name, spec, points) in laplacian_cases() {
        for x in &points {
            for t in LAPLACIAN_TIMES {
                let err = laplacian_error(&spec, t, x)?;
                worst.update(err, || format!("{name} x={x:?} t={t:e}"));
            }
        }
    }
    Ok(vec![worst.check("laplacian", "FD Laplacian ratio vs closed form", 1e-4)])
}

pub const FIGURE_TIMES: [f64; 5] = [1e-4, 1e-3, 1e-2, 1e-1, 1.0];

/// Largest `|log ρ_analytic − log ρ_quadrature|` over a set of points and times.
pub fn quadrature_gap(
    model: &MixtureModel,
    points: &[Vec<f64>],
    times: &[f64],
    label: &str,
) -> Result<(f64, String)> {
    let settings = QuadratureSettings::default();
    let mut worst = Worst::new();
    for z in points {
        for &t in times {
            let q = rho_quadrature(model, t, z, &settings)?.value;
            let a = log_mixture_rho(model, t, z)?.value();
            worst.update((q - a).abs(), || format!("{label} z={z:?} t={t:e}"));
        }
    }
    Ok((worst.error, worst.at))
}

pub fn figure_quadrature_gaps() -> Result<Vec<(f64, String)>> {
    let line_points: Vec<Vec<f64>> = linspace(-3.0, 3.0, 401).into_iter().map(|x| vec![x, 0.0]).collect();
    let box_points: Vec<Vec<f64>> = linspace(-0.25, 1.25, 401).into_iter().map(|x| vec![x, 0.0]).collect();
    let parallel_times = TimeGrid::log_spaced(1e-3, 1e2, 10)?;
    Ok(vec![
        quadrature_gap(&catalog::gaussian_line(), &line_points, &FIGURE_TIMES, "parabola")?,
        quadrature_gap(&catalog::uniform_interval(), &box_points, &FIGURE_TIMES, "uniform")?,
        quadrature_gap(&catalog::parallel_lines(), &[vec![0.0, 0.0]], parallel_times.values(), "parallel")?,
    ])
}

/// Largest relative gap between the generic mixture bias and the
/// parallel-lines closed form on the figure grid.
pub fn parallel_closed_form_gap() -> Result<(f64, String)> {
    let grid = TimeGrid::log_spaced(1e-3, 1e2, 10)?;
    let curve = bias_curve(&catalog::parallel_lines(), &[0.0, 0.0], &grid, Some(1))?;
    let mut worst = Worst::new();
    for row in &curve.rows {
        let closed = parallel_planes_beta(row.t, 0.5, 1.0, -1.0)?.bias;
        let rel = (row.bias - closed).abs() / closed.abs().max(f64::MIN_POSITIVE);
        worst.update(rel, || format!("t={:e}", row.t));
    }
    Ok((worst.error, worst.at))
}

fn mixture() -> Result<Vec<Check>> {
    let mut quad = Worst::new();
    for (gap, at) in figure_quadrature_gaps()? {
        quad.update(gap, || at);
    }
    let (gap, at) = parallel_closed_form_gap()?;
    let mut parallel = Worst::new();
    parallel.update(gap, || at);

    let model = catalog::point_and_box();
    let mut bound = Worst::new();
    for t in [1.0, 0.3, 0.1, 0.03] {
        let w = mixture_beta_t(&model, t, &[0.0])?.responsibilities[0];
        let b = coefficient_bound(0.5, 0.5, 1.0, 1.0, 0.5, t)?;
        bound.update((w - b).max(0.0), || format!("t={t:e} w={w:e} bound={b:e}"));
    }

    let mut limit = Worst::new();
    let beta = mixture_beta_t(&catalog::intersecting(), 1e-8, &[0.0, 0.0, 0.0])?.value.beta;
    limit.update((beta + 2.0).abs(), || "intersecting z=0 t=1e-8".into());

    Ok(vec![
        quad.check("mixture", "quadrature vs closed-form log rho", 1e-7),
        parallel.check("mixture", "parallel lines: mixture vs closed form", 1e-12),
        bound.check("mixture", "responsibility above coefficient bound", 0.0),
        limit.check("mixture", "intersection beta vs d_min - D", 1e-3),
    ])
}

fn slopes() -> Result<Vec<Check>> {
    let model = catalog::gaussian_line();
    let z = [0.0, 0.0];
    let times: Vec<f64> = (4..=12).map(|k| 10f64.powi(-k)).collect();
    let seq = asymptotic_slope_pair(&DiffusedDensity { model: &model, point: &z }, &times)?;
    let last = seq.pairs[seq.pairs.len() - 1];
    let at = format!("gaussian line t={:e}", last.t);
    let mut gap = Worst::new();
    gap.update((last.cond3_slope - last.cond4_value).abs(), || at.clone());
    let mut limit = Worst::new();
    limit.update((last.cond3_slope + 0.5).abs(), || at.clone());
    limit.update((last.cond4_value + 0.5).abs(), || at.clone());

    let alpha = 0.75;
    let synthetic = asymptotic_slope_pair(&PowerLaw { alpha }, &times)?;
    let mut exact = Worst::new();
    for p in &synthetic.pairs {
        exact.update((p.cond4_value + alpha).abs(), || format!("t={:e}", p.t));
    }

    let off = [0.0, 0.1];
    let off_times: Vec<f64> = (1..=8).map(|k| 10f64.powi(-k)).collect();
    let seq = asymptotic_slope_pair(&DiffusedDensity { model: &model, point: &off }, &off_times)?;
    let mut flag = Worst::new();
    flag.update(if seq.diverging { 0.0 } else { 1.0 }, || "gaussian line z=(0, 0.1)".into());

    Ok(vec![
        gap.check("slopes", "cond3 slope vs cond4 at smallest t", 1e-3),
        limit.check("slopes", "cond3/cond4 vs beta/2", 1e-3),
        exact.check("slopes", "synthetic t^-alpha: cond4 + alpha", 0.0),
        flag.check("slopes", "off-manifold divergence not flagged", 0.0),
    ])
}
