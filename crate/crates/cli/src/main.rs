use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use heatlid::estimator::{bias_curve, estimate_lid_with, Abscissa, DensitySource, LidEstimate, TimeGrid};
use heatlid::oracle::{McSettings, QuadratureSettings};
use heatlid::{DensitySpec, Error, MixtureModel};
use heatlid_cli::figures::{self, FigureName, GridOverrides};
use heatlid_cli::output::{self, num, RunManifest};
use heatlid_cli::verify::{self, Suite};
use serde_json::json;

/// Closed-form diffused densities and LIDL bias for flat-manifold mixtures.
#[derive(Parser)]
#[command(name = "heatlid", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a model file and print its components.
    Describe { config: PathBuf },

    /// Tabulate log rho_t, beta_t and the bias over a log-spaced time grid.
    BetaCurve {
        config: PathBuf,
        /// Comma-separated coordinates; repeat for several points.
        #[arg(long, required = true, allow_hyphen_values = true)]
        point: Vec<String>,
        #[arg(long)]
        t_min: f64,
        #[arg(long)]
        t_max: f64,
        #[arg(long, default_value_t = 10)]
        per_decade: usize,
        /// Dimension the bias is measured against (default: smallest
        /// component containing the point).
        #[arg(long)]
        d_ref: Option<usize>,
        /// CSV path; a `<stem>.manifest.json` is written next to it.
        /// Without it the CSV goes to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Reproduce one of the built-in bias figures as CSV and SVG.
    Figure {
        name: FigureName,
        #[arg(long)]
        out_csv: PathBuf,
        #[arg(long)]
        out_svg: Option<PathBuf>,
        /// Explicit comma-separated time list, replacing the default set.
        #[arg(long)]
        times: Option<String>,
        #[arg(long)]
        t_min: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        per_decade: Option<usize>,
    },

    /// Run the LIDL regression at one point.
    ///
    /// The default abscissa is log(delta) with delta = sqrt(t). `--abscissa t`
    /// regresses on log t instead, which halves the slope: the squared-delta
    /// mistake seen in earlier LIDL reports.
    Lid {
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Centre of the 7-point grid t_center * 10^(j/7), j = -3..3.
        #[arg(long)]
        t_center: f64,
        #[arg(long, value_enum, default_value_t = SourceArg::Analytic)]
        source: SourceArg,
        /// Monte Carlo samples per grid point (accepts 1e6).
        #[arg(long, default_value = "100000", value_parser = parse_count)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        nodes: usize,
        #[arg(long, value_enum, default_value_t = AbscissaArg::Delta)]
        abscissa: AbscissaArg,
        /// `.json` or `.csv`; a manifest is written next to CSV output.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Check the closed forms against the numerical oracles.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Replace every check's tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceArg {
    Analytic,
    Quadrature,
    #[value(name = "monte_carlo", alias = "monte-carlo")]
    MonteCarlo,
}

#[derive(Clone, Copy, ValueEnum)]
enum AbscissaArg {
    Delta,
    T,
}

fn parse_count(s: &str) -> Result<usize, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if v >= 1.0 && v.fract() == 0.0 && v <= 1e15 {
        Ok(v as usize)
    } else {
        Err(format!("expected a positive integer, got {s}"))
    }
}

/// Error with the process exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

const EXIT_VERIFY: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn usage(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        error: error.into(),
    }
}

fn numeric(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: EXIT_NUMERIC,
        error: error.into(),
    }
}

/// Input problems are usage errors; anything else raised while computing is
/// a numeric failure.
fn classify(error: Error) -> Failure {
    match error {
        Error::InvalidTime(_)
        | Error::InvalidGrid(_)
        | Error::PointDim { .. }
        | Error::InvalidSettings(_)
        | Error::InvalidArgument(_)
        | Error::ImproperSampling
        | Error::QuadratureDim { .. } => usage(error),
        _ => numeric(error),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Describe { config } => describe(&config),
        Command::BetaCurve {
            config,
            point,
            t_min,
            t_max,
            per_decade,
            d_ref,
            out,
        } => beta_curve(&config, &point, t_min, t_max, per_decade, d_ref, out.as_deref()),
        Command::Figure {
            name,
            out_csv,
            out_svg,
            times,
            t_min,
            t_max,
            per_decade,
        } => {
            let times = times.map(|s| parse_list(&s)).transpose().map_err(usage)?;
            let overrides = GridOverrides {
                times,
                t_min,
                t_max,
                per_decade,
            };
            figure(name, &overrides, &out_csv, out_svg.as_deref())
        }
        Command::Lid {
            config,
            point,
            t_center,
            source,
            samples,
            seed,
            nodes,
            abscissa,
            out,
        } => {
            let source = match source {
                SourceArg::Analytic => DensitySource::Analytic,
                SourceArg::Quadrature => DensitySource::Quadrature(QuadratureSettings {
                    nodes_per_axis: nodes,
                    ..Default::default()
                }),
                SourceArg::MonteCarlo => DensitySource::MonteCarlo(McSettings { samples, seed }),
            };
            let abscissa = match abscissa {
                AbscissaArg::Delta => Abscissa::Delta,
                AbscissaArg::T => Abscissa::T,
            };
            lid(&config, &point, t_center, source, abscissa, out.as_deref())
        }
        Command::Verify { suite, tol } => run_verify(suite, tol),
    }
}

fn load_model(path: &Path) -> Result<MixtureModel, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(usage)?;
    serde_json::from_str(&text)
        .with_context(|| format!("invalid model {}", path.display()))
        .map_err(usage)
}

fn parse_list(s: &str) -> anyhow::Result<Vec<f64>> {
    s.split(',')
        .map(|v| {
            let v = v.trim();
            let x: f64 = v.parse().map_err(|_| anyhow!("not a number: {v:?}"))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(anyhow!("non-finite value {v:?}"))
            }
        })
        .collect()
}

fn parse_point(s: &str, model: &MixtureModel) -> Result<Vec<f64>, Failure> {
    let z = parse_list(s).with_context(|| format!("bad --point {s:?}")).map_err(usage)?;
    model.check_point(&z).map_err(classify)?;
    Ok(z)
}

fn model_json(model: &MixtureModel) -> serde_json::Value {
    serde_json::to_value(model).unwrap_or(serde_json::Value::Null)
}

fn describe(config: &Path) -> Result<u8, Failure> {
    let model = load_model(config)?;
    println!("ambient dimension D = {}", model.ambient_dim());
    println!("components: {}", model.len());
    for (i, (c, w)) in model.components().iter().zip(model.weights()).enumerate() {
        let density = match c.density() {
            DensitySpec::ConstantOne => "constant (improper)".to_string(),
            DensitySpec::Point => "point mass".to_string(),
            DensitySpec::GaussianDiag { sigmas } => format!("gaussian sigmas={sigmas:?}"),
            DensitySpec::UniformBox { bounds } => format!("box bounds={bounds:?}"),
        };
        println!(
            "  [{i}] d={} |v|={} weight={} density={density}",
            c.dim(),
            c.offset_norm(),
            w
        );
    }
    Ok(0)
}

fn beta_curve(
    config: &Path,
    points: &[String],
    t_min: f64,
    t_max: f64,
    per_decade: usize,
    d_ref: Option<usize>,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let start = Instant::now();
    let model = load_model(config)?;
    let grid = TimeGrid::log_spaced(t_min, t_max, per_decade).map_err(classify)?;
    let points = points
        .iter()
        .map(|p| parse_point(p, &model))
        .collect::<Result<Vec<_>, _>>()?;
    let curves = points
        .iter()
        .map(|z| bias_curve(&model, z, &grid, d_ref))
        .collect::<heatlid::Result<Vec<_>>>()
        .map_err(classify)?;
    let csv = output::beta_curves_csv(&curves);
    if curves.iter().any(|c| c.rows.iter().any(|r| r.diverged)) {
        eprintln!("warning: some points lie off the support; beta_t diverges as t -> 0");
    }
    match out {
        Some(path) => {
            let manifest = RunManifest::new(
                "beta-curve",
                model_json(&model),
                json!({ "t_min": t_min, "t_max": t_max, "per_decade": per_decade, "d_ref": d_ref, "points": points }),
            );
            output::write_csv_with_manifest(path, &csv, manifest, &[], start.elapsed()).map_err(usage)?;
            println!("wrote {} rows to {}", curves.iter().map(|c| c.rows.len()).sum::<usize>(), path.display());
        }
        None => print!("{csv}"),
    }
    Ok(0)
}

fn figure(
    name: FigureName,
    overrides: &GridOverrides,
    out_csv: &Path,
    out_svg: Option<&Path>,
) -> Result<u8, Failure> {
    let start = Instant::now();
    let fig = figures::build(name, overrides).map_err(classify)?;
    let csv = output::beta_curves_csv(&fig.curves);
    let mut extra = Vec::new();
    if let Some(svg) = out_svg {
        output::write_file(svg, &fig.plot.render()).map_err(usage)?;
        extra.push(svg);
    }
    let label = name.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let mut manifest = RunManifest::new("figure", model_json(&fig.model), fig.grid);
    manifest.command = format!("figure {label}");
    output::write_csv_with_manifest(out_csv, &csv, manifest, &extra, start.elapsed()).map_err(usage)?;
    println!("wrote {}", out_csv.display());
    if let Some(svg) = out_svg {
        println!("wrote {}", svg.display());
    }
    Ok(0)
}

fn lid_csv(est: &LidEstimate) -> String {
    let mut s = String::from(
        "source,abscissa,slope,intercept,lid_estimate,residual_rms,slope_error,off_manifold\n",
    );
    let _ = writeln!(
        s,
        "{},{},{},{},{},{},{},{}",
        est.source,
        match est.abscissa {
            Abscissa::Delta => "delta",
            Abscissa::T => "t",
        },
        num(est.fit.slope),
        num(est.fit.intercept),
        num(est.fit.lid_estimate),
        num(est.fit.residual_rms),
        num(est.slope_error),
        est.off_manifold
    );
    s
}

fn lid(
    config: &Path,
    point: &str,
    t_center: f64,
    source: DensitySource,
    abscissa: Abscissa,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let start = Instant::now();
    let model = load_model(config)?;
    let z = parse_point(point, &model)?;
    let grid = TimeGrid::centered(t_center).map_err(classify)?;
    let est = estimate_lid_with(&model, &z, &grid, &source, abscissa).map_err(classify)?;
    println!("source        {}", est.source);
    println!("slope         {}", est.fit.slope);
    println!("intercept     {}", est.fit.intercept);
    println!("lid estimate  {}", est.fit.lid_estimate);
    println!("residual rms  {}", est.fit.residual_rms);
    if est.slope_error > 0.0 {
        println!("slope error   {} (3 sigma band +/- {})", est.slope_error, 3.0 * est.slope_error);
    }
    if est.off_manifold {
        eprintln!("warning: point lies off the support; the estimate diverges above D as t -> 0");
    }
    if let Some(path) = out {
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            let json = serde_json::to_string_pretty(&est).map_err(numeric)?;
            output::write_file(path, &(json + "\n")).map_err(usage)?;
        } else {
            let mut manifest = RunManifest::new(
                "lid",
                model_json(&model),
                json!({ "t_center": t_center, "times": grid.values(), "point": z }),
            );
            if let DensitySource::MonteCarlo(mc) = source {
                manifest.seed = Some(mc.seed);
            }
            output::write_csv_with_manifest(path, &lid_csv(&est), manifest, &[], start.elapsed())
                .map_err(usage)?;
        }
    }
    Ok(0)
}

fn run_verify(suite: Suite, tol: Option<f64>) -> Result<u8, Failure> {
    if let Some(t) = tol {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(usage(anyhow!("--tol must be a non-negative number")));
        }
    }
    let mut checks = verify::run(suite).map_err(classify)?;
    if let Some(t) = tol {
        for c in &mut checks {
            c.tolerance = t;
        }
    }
    println!("{:<10} {:<44} {:>12} {:>10}  status", "suite", "check", "max_error", "tolerance");
    for c in &checks {
        println!(
            "{:<10} {:<44} {:>12.3e} {:>10.1e}  {}",
            c.suite,
            c.name,
            c.max_error,
            c.tolerance,
            if c.passed() { "ok" } else { "FAIL" }
        );
    }
    let failed: Vec<_> = checks.iter().filter(|c| !c.passed()).collect();
    if failed.is_empty() {
        return Ok(0);
    }
    println!();
    for c in failed {
        println!("FAIL {}: {} (worst at {})", c.suite, c.name, c.worst);
    }
    Ok(EXIT_VERIFY)
}
