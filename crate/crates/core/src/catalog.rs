//! Built-in models used by the figures, the `verify` suites and the tests.
//!
//! Each entry carries a handful of evaluation points mixing on-manifold,
//! boundary and off-manifold locations.

use crate::model::{ManifoldComponent, MixtureModel};

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub model: MixtureModel,
    pub points: Vec<Vec<f64>>,
}

// The constructors below only combine literal, valid parameters.
fn build(components: Vec<ManifoldComponent>, ambient: usize, weights: Vec<f64>) -> MixtureModel {
    MixtureModel::new(ambient, components, weights).expect("catalog model is valid")
}

/// Standard normal on a line in the plane.
pub fn gaussian_line() -> MixtureModel {
    build(
        vec![ManifoldComponent::gaussian(vec![1.0], vec![0.0]).expect("valid")],
        2,
        vec![1.0],
    )
}

/// Full-dimensional Gaussian in ℝ³ with standard deviations 1, 1e-3, 1e-6.
pub fn stairs() -> MixtureModel {
    build(
        vec![ManifoldComponent::gaussian(vec![1.0, 1e-3, 1e-6], vec![]).expect("valid")],
        3,
        vec![1.0],
    )
}

/// U(0, 1) on a line in the plane.
pub fn uniform_interval() -> MixtureModel {
    build(
        vec![ManifoldComponent::uniform_box(vec![(0.0, 1.0)], vec![0.0]).expect("valid")],
        2,
        vec![1.0],
    )
}

/// Uniform on `[0,1]×[0,2]` inside ℝ³.
pub fn box_plane() -> MixtureModel {
    build(
        vec![ManifoldComponent::uniform_box(vec![(0.0, 1.0), (0.0, 2.0)], vec![0.0]).expect("valid")],
        3,
        vec![1.0],
    )
}

/// Two copies of the improper constant density on parallel lines at
/// distance 1, equal weights.
pub fn parallel_lines() -> MixtureModel {
    build(
        vec![
            ManifoldComponent::constant(1, vec![0.0]).expect("valid"),
            ManifoldComponent::constant(1, vec![1.0]).expect("valid"),
        ],
        2,
        vec![0.5, 0.5],
    )
}

/// A Gaussian line lying inside a Gaussian plane in ℝ³, meeting along the
/// first axis; both unit scale, equal weights.
pub fn intersecting() -> MixtureModel {
    build(
        vec![
            ManifoldComponent::gaussian(vec![1.0], vec![0.0, 0.0]).expect("valid"),
            ManifoldComponent::gaussian(vec![1.0, 1.0], vec![0.0]).expect("valid"),
        ],
        3,
        vec![0.5, 0.5],
    )
}

/// Point mass at 1 and uniform density on `[-0.25, 0.25]`, in ℝ¹.
///
/// Around `x = 0` the box fills `B(0, 0.5)` with mass 1 while the point
/// mass stays outside the open ball `B(0, 1)`.
pub fn point_and_box() -> MixtureModel {
    build(
        vec![
            ManifoldComponent::point(vec![1.0]).expect("valid"),
            ManifoldComponent::uniform_box(vec![(-0.25, 0.25)], vec![]).expect("valid"),
        ],
        1,
        vec![0.5, 0.5],
    )
}

/// Improper constant density filling the plane.
pub fn constant_plane() -> MixtureModel {
    build(
        vec![ManifoldComponent::constant(2, vec![]).expect("valid")],
        2,
        vec![1.0],
    )
}

pub fn all() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "gaussian-line",
            description: "N(0,1) on a line, D=2",
            model: gaussian_line(),
            points: vec![
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![-2.0, 0.0],
                vec![0.5, 0.1],
                vec![3.0, 0.0],
            ],
        },
        CatalogEntry {
            name: "stairs",
            description: "Gaussian with sigmas 1, 1e-3, 1e-6, D=3",
            model: stairs(),
            points: vec![
                vec![0.0, 0.0, 0.0],
                vec![0.0, 0.0, 1e-6],
                vec![0.0, 0.0, 2e-6],
                vec![0.5, 1e-3, 0.0],
                vec![1.0, 0.0, 0.0],
            ],
        },
        CatalogEntry {
            name: "uniform",
            description: "U(0,1) on a line, D=2",
            model: uniform_interval(),
            points: vec![
                vec![0.5, 0.0],
                vec![0.0, 0.0],
                vec![0.25, 0.0],
                vec![1.2, 0.0],
                vec![-0.1, 0.05],
            ],
        },
        CatalogEntry {
            name: "box-plane",
            description: "uniform on [0,1]x[0,2], D=3",
            model: box_plane(),
            points: vec![
                vec![0.5, 1.0, 0.0],
                vec![0.0, 0.0, 0.0],
                vec![0.2, 0.3, 0.0],
                vec![1.5, 1.0, 0.0],
                vec![0.5, 2.5, 0.1],
            ],
        },
        CatalogEntry {
            name: "parallel",
            description: "two constant lines at distance 1, D=2",
            model: parallel_lines(),
            points: vec![
                vec![0.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, 0.5],
                vec![3.0, 0.25],
                vec![0.0, 2.0],
            ],
        },
        CatalogEntry {
            name: "intersecting",
            description: "Gaussian line inside a Gaussian plane, D=3",
            model: intersecting(),
            points: vec![
                vec![0.0, 0.0, 0.0],
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.5, 0.5, 0.5],
                vec![0.0, 0.0, 1.0],
            ],
        },
        CatalogEntry {
            name: "point-box",
            description: "point mass at 1 plus U(-0.25,0.25), D=1",
            model: point_and_box(),
            points: vec![vec![0.0], vec![1.0], vec![0.1], vec![0.5], vec![-1.0]],
        },
        CatalogEntry {
            name: "constant",
            description: "constant density on the plane, D=2",
            model: constant_plane(),
            points: vec![
                vec![0.0, 0.0],
                vec![1.0, -1.0],
                vec![10.0, 3.0],
                vec![-0.5, 0.25],
                vec![2.0, 2.0],
            ],
        },
    ]
}

pub fn by_name(name: &str) -> Option<CatalogEntry> {
    all().into_iter().find(|e| e.name == name)
}
