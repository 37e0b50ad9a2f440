use heatlid::analytic::{component_beta_t, contains, smoothed_laplacian_ratio};
use heatlid::catalog;
use heatlid::estimator::{bias_curve, estimate_lid, DensitySource, TimeGrid};

#[test]
fn single_component_bias_is_the_smoothed_laplacian_term() {
    let grid = TimeGrid::log_spaced(1e-6, 10.0, 3).unwrap();
    for model in [catalog::gaussian_line(), catalog::uniform_interval(), catalog::box_plane(), catalog::stairs()] {
        let c = &model.components()[0];
        let d = c.dim();
        let mut z = vec![0.3; model.ambient_dim()];
        z[d..].iter_mut().for_each(|v| *v = 0.0);
        let curve = bias_curve(&model, &z, &grid, None).unwrap();
        assert_eq!(curve.reference_dim, d);
        for row in &curve.rows {
            let term = row.t * smoothed_laplacian_ratio(c.density(), row.t, &z[..d]).unwrap();
            assert!((row.bias - term).abs() <= 1e-12 * term.abs().max(1e-300), "{} vs {term}", row.bias);
            assert_eq!(row.beta, component_beta_t(c, row.t, &z).unwrap().beta);
        }
    }
}

#[test]
fn lid_converges_for_single_components() {
    let grid = TimeGrid::centered(1e-10).unwrap();
    for entry in catalog::all() {
        // The stairs model has a 1e-12 variance axis, which a grid at 1e-10
        // cannot resolve: it reads as two-dimensional there.
        if entry.model.len() != 1 || entry.name == "stairs" {
            continue;
        }
        let c = &entry.model.components()[0];
        for z in entry.points.iter().filter(|z| contains(c, z)) {
            let est = estimate_lid(&entry.model, z, &grid, &DensitySource::Analytic).unwrap();
            assert!(
                (est.fit.lid_estimate - c.dim() as f64).abs() < 1e-2,
                "{} at {z:?}: {}",
                entry.name,
                est.fit.lid_estimate
            );
        }
    }
}

#[test]
fn beta_curve_rows_are_sorted_and_consistent() {
    let model = catalog::intersecting();
    let grid = TimeGrid::log_spaced(1e-8, 1.0, 2).unwrap();
    let curve = bias_curve(&model, &[0.0, 0.0, 0.0], &grid, None).unwrap();
    assert!(curve.rows.windows(2).all(|w| w[0].t < w[1].t));
    for row in &curve.rows {
        let base = curve.reference_dim as f64 - curve.ambient_dim as f64;
        assert!((row.bias - (row.beta - base)).abs() < 1e-12);
        assert!((row.responsibilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
    let last_small = &curve.rows[0];
    assert!((last_small.beta + 2.0).abs() < 1e-3);
}
