use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn heatlid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heatlid"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
        .display()
        .to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn describe_lists_components() {
    let out = heatlid(&["describe", &config("two_planes.json")]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("D = 3"));
    assert!(text.contains("[0] d=2"));
    assert!(text.contains("[1] d=2 |v|=1"));
}

#[test]
fn describe_rejects_bad_configs() {
    let dir = tempfile::tempdir().unwrap();
    let malformed = write(dir.path(), "bad.json", "{\"ambient_dim\": 2, ");
    assert_eq!(heatlid(&["describe", &malformed]).status.code(), Some(2));

    let light = write(
        dir.path(),
        "light.json",
        r#"{"ambient_dim": 2, "weights": [0.45, 0.45], "components": [
            {"dim": 1, "offset": [0.0], "density": {"type": "constant"}},
            {"dim": 1, "offset": [1.0], "density": {"type": "constant"}}]}"#,
    );
    let out = heatlid(&["describe", &light]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("weights not normalizable"));

    let missing = dir.path().join("absent.json").display().to_string();
    assert_eq!(heatlid(&["describe", &missing]).status.code(), Some(2));
}

#[test]
fn constant_density_has_zero_bias() {
    let out = heatlid(&[
        "beta-curve",
        &config("constant_line.json"),
        "--point",
        "0.3,0",
        "--t-min",
        "1e-6",
        "--t-max",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let bias = headers.iter().position(|h| h == "bias").unwrap();
    let mut rows = 0;
    for record in reader.records() {
        assert_eq!(record.unwrap()[bias].parse::<f64>().unwrap(), 0.0);
        rows += 1;
    }
    assert_eq!(rows, 71);
}

#[test]
fn off_manifold_points_are_marked_diverged() {
    let out = heatlid(&[
        "beta-curve",
        &config("gaussian_line.json"),
        "--point",
        "0,0.5",
        "--t-min",
        "1e-4",
        "--t-max",
        "1e-2",
        "--per-decade",
        "1",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert_eq!(&r[6], "true");
        let t: f64 = r[0].parse().unwrap();
        let bias: f64 = r[5].parse().unwrap();
        // ‖y‖²/t dominates.
        assert!((bias * t / 0.25 - 1.0).abs() < 0.05);
    }
}

#[test]
fn beta_curve_bad_flags() {
    let model = config("gaussian_line.json");
    let bad_range = heatlid(&["beta-curve", &model, "--point", "0,0", "--t-min", "1", "--t-max", "0.1"]);
    assert_eq!(bad_range.status.code(), Some(2));
    let bad_point = heatlid(&["beta-curve", &model, "--point", "0,0,0", "--t-min", "0.1", "--t-max", "1"]);
    assert_eq!(bad_point.status.code(), Some(2));
    let missing = heatlid(&["beta-curve", &model, "--t-min", "0.1", "--t-max", "1"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn beta_curve_rows_are_grouped_by_point() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("curve.csv");
    let out = heatlid(&[
        "beta-curve",
        &config("line_in_plane.json"),
        "--point",
        "0,0,0",
        "--point",
        "-1,0.5,0",
        "--t-min",
        "1e-3",
        "--t-max",
        "1",
        "--per-decade",
        "2",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,sqrt_t,x_coords,log_rho,beta,bias,diverged,w_0,w_1");
    assert_eq!(lines.len(), 1 + 2 * 7);
    assert!(lines[1..8].iter().all(|l| l.contains(",0e0;0e0;0e0,")));
    assert!(lines[8..].iter().all(|l| l.contains(",-1e0;5e-1;0e0,")));
    assert!(dir.path().join("curve.manifest.json").exists());
}

#[test]
fn figure_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |stem: &str| -> (Vec<u8>, PathBuf) {
        let csv = dir.path().join(format!("{stem}.csv"));
        let svg = dir.path().join(format!("{stem}.svg"));
        let out = heatlid(&[
            "figure",
            "stairs",
            "--out-csv",
            csv.to_str().unwrap(),
            "--out-svg",
            svg.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        (fs::read(&csv).unwrap(), svg)
    };
    let (a, svg) = run("a");
    let (b, _) = run("b");
    assert_eq!(a, b);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("a.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "figure stairs");
    assert_eq!(manifest["config"]["ambient_dim"], 3);
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);
    let svg = fs::read_to_string(svg).unwrap();
    assert!(svg.contains(r#"viewBox="0 0 800 600""#));
    assert_eq!(svg.matches("<polyline").count(), 3);
}

#[test]
fn unknown_figure_is_a_usage_error() {
    assert_eq!(heatlid(&["figure", "spiral", "--out-csv", "x.csv"]).status.code(), Some(2));
}

#[test]
fn lid_estimates() {
    let out = heatlid(&["lid", &config("gaussian_line.json"), "--point", "0,0", "--t-center", "1e-8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lid: f64 = text
        .lines()
        .find(|l| l.starts_with("lid estimate"))
        .and_then(|l| l.split_whitespace().last())
        .unwrap()
        .parse()
        .unwrap();
    assert!((lid - 1.0).abs() < 0.01);

    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("point.json");
    let out = heatlid(&[
        "lid",
        &config("point_mass.json"),
        "--point",
        "0.5",
        "--t-center",
        "1e-4",
        "--out",
        json_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let est: serde_json::Value = serde_json::from_str(&fs::read_to_string(json_path).unwrap()).unwrap();
    assert!(est["fit"]["lid_estimate"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn lid_monte_carlo_band_covers_truth() {
    let out = heatlid(&[
        "lid",
        &config("gaussian_line.json"),
        "--point",
        "0,0",
        "--t-center",
        "1e-8",
        "--source",
        "monte_carlo",
        "--samples",
        "1e6",
        "--seed",
        "7",
        "--out",
        tempfile::tempdir().unwrap().path().join("mc.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let field = |name: &str| -> f64 {
        text.lines()
            .find(|l| l.starts_with(name))
            .and_then(|l| l[name.len()..].split_whitespace().next())
            .unwrap()
            .parse()
            .unwrap()
    };
    let lid = field("lid estimate");
    let err = field("slope error");
    assert!(err > 0.0);
    assert!((lid - 1.0).abs() <= 3.0 * err, "lid {lid} err {err}");
}

#[test]
fn lid_numeric_failure_exits_3() {
    // Every kernel value underflows, so the Monte Carlo density is zero.
    let out = heatlid(&[
        "lid",
        &config("gaussian_line.json"),
        "--point",
        "0,100",
        "--t-center",
        "1e-6",
        "--source",
        "monte_carlo",
        "--samples",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn lid_rejects_improper_sampling() {
    let out = heatlid(&[
        "lid",
        &config("constant_line.json"),
        "--point",
        "0,0",
        "--t-center",
        "1e-3",
        "--source",
        "monte_carlo",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let out = heatlid(&["verify", "--suite", "heat"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let residual: f64 = text
        .lines()
        .find(|l| l.contains("closed-form beta"))
        .and_then(|l| l.split_whitespace().rev().nth(2))
        .unwrap()
        .parse()
        .unwrap();
    assert!(residual < 1e-5);

    assert_eq!(heatlid(&["verify", "--suite", "heat", "--tol", "1e-18"]).status.code(), Some(1));
    assert_eq!(heatlid(&["verify", "--suite", "slopes"]).status.code(), Some(0));
    assert_eq!(heatlid(&["verify", "--suite", "bogus"]).status.code(), Some(2));
}
