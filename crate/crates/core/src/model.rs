//! Flat-manifold mixture models.
//!
//! Every component occupies the leading `d` axes of the ambient space and is
//! shifted by an offset `v` living in the trailing `D - d` axes. A point `z`
//! therefore splits into on-manifold coordinates `x = z[..d]` and normal
//! coordinates `y = z[d..] - v`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Weights whose sum falls within this band of 1 are renormalized; anything
/// further out is rejected.
pub const WEIGHT_SUM_BAND: f64 = 1e-6;

/// Tolerance under which a weight vector already counts as normalized.
const NORMALIZED_EPS: f64 = 1e-12;

/// On-manifold density ψ on ℝ^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum DensitySpec {
    /// The improper density ψ ≡ 1.
    #[serde(rename = "constant")]
    ConstantOne,
    /// Axis-aligned Gaussian with per-axis standard deviations.
    #[serde(rename = "gaussian")]
    GaussianDiag { sigmas: Vec<f64> },
    /// Uniform distribution on a box, one `(a, b)` pair per axis.
    #[serde(rename = "box")]
    UniformBox { bounds: Vec<(f64, f64)> },
    /// Unit point mass; only valid for `d = 0` components.
    #[serde(rename = "point")]
    Point,
}

impl DensitySpec {
    /// Dimension implied by the parameters; `None` for the constant density,
    /// which adapts to its component.
    pub fn implied_dim(&self) -> Option<usize> {
        match self {
            DensitySpec::ConstantOne => None,
            DensitySpec::GaussianDiag { sigmas } => Some(sigmas.len()),
            DensitySpec::UniformBox { bounds } => Some(bounds.len()),
            DensitySpec::Point => Some(0),
        }
    }

    pub fn is_improper(&self) -> bool {
        matches!(self, DensitySpec::ConstantOne)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            DensitySpec::ConstantOne => "constant",
            DensitySpec::GaussianDiag { .. } => "gaussian",
            DensitySpec::UniformBox { .. } => "box",
            DensitySpec::Point => "point",
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            DensitySpec::ConstantOne | DensitySpec::Point => Ok(()),
            DensitySpec::GaussianDiag { sigmas } => {
                for (axis, &s) in sigmas.iter().enumerate() {
                    if !s.is_finite() {
                        return Err(Error::NonFinite("sigma"));
                    }
                    if s <= 0.0 {
                        return Err(Error::NonPositiveSigma { axis, value: s });
                    }
                }
                Ok(())
            }
            DensitySpec::UniformBox { bounds } => {
                for (axis, &(lower, upper)) in bounds.iter().enumerate() {
                    if !(lower.is_finite() && upper.is_finite()) {
                        return Err(Error::NonFinite("box bounds"));
                    }
                    if !(upper - lower > 0.0 && (upper - lower).is_finite()) {
                        return Err(Error::DegenerateBox { axis, lower, upper });
                    }
                }
                Ok(())
            }
        }
    }
}

/// Evaluates ψ(x). The caller guarantees `x` has the density's dimension.
pub fn eval_psi(spec: &DensitySpec, x: &[f64]) -> f64 {
    match spec {
        DensitySpec::ConstantOne | DensitySpec::Point => 1.0,
        DensitySpec::GaussianDiag { sigmas } => sigmas
            .iter()
            .zip(x)
            .map(|(&s, &xi)| (-0.5 * (xi / s).powi(2)).exp() / (s * (2.0 * PI).sqrt()))
            .product(),
        DensitySpec::UniformBox { bounds } => {
            let mut value = 1.0;
            for (&(a, b), &xi) in bounds.iter().zip(x) {
                if xi < a || xi > b {
                    return 0.0;
                }
                value /= b - a;
            }
            value
        }
    }
}

/// A flat `d`-dimensional affine component of ℝ^D.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldComponent {
    dim: usize,
    #[serde(default)]
    offset: Vec<f64>,
    density: DensitySpec,
}

impl ManifoldComponent {
    pub fn new(dim: usize, offset: Vec<f64>, density: DensitySpec) -> Result<Self> {
        let component = ManifoldComponent {
            dim,
            offset,
            density,
        };
        component.validate(0, component.ambient_dim())?;
        Ok(component)
    }

    /// Gaussian component on the leading `sigmas.len()` axes.
    pub fn gaussian(sigmas: Vec<f64>, offset: Vec<f64>) -> Result<Self> {
        Self::new(sigmas.len(), offset, DensitySpec::GaussianDiag { sigmas })
    }

    pub fn uniform_box(bounds: Vec<(f64, f64)>, offset: Vec<f64>) -> Result<Self> {
        Self::new(bounds.len(), offset, DensitySpec::UniformBox { bounds })
    }

    pub fn constant(dim: usize, offset: Vec<f64>) -> Result<Self> {
        Self::new(dim, offset, DensitySpec::ConstantOne)
    }

    pub fn point(location: Vec<f64>) -> Result<Self> {
        Self::new(0, location, DensitySpec::Point)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `D`, recovered from `d` and the offset length.
    pub fn ambient_dim(&self) -> usize {
        self.dim + self.offset.len()
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    pub fn density(&self) -> &DensitySpec {
        &self.density
    }

    pub fn offset_norm(&self) -> f64 {
        self.offset.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn validate(&self, index: usize, ambient: usize) -> Result<()> {
        if self.dim > ambient {
            return Err(Error::IntrinsicDim {
                index,
                dim: self.dim,
                ambient,
            });
        }
        if self.offset.len() != ambient - self.dim {
            return Err(Error::OffsetLength {
                index,
                expected: ambient - self.dim,
                got: self.offset.len(),
            });
        }
        if self.offset.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("offset"));
        }
        let implied = self.density.implied_dim();
        let expected = self.dim;
        match (&self.density, implied) {
            (DensitySpec::ConstantOne, _) if self.dim == 0 => {
                return Err(Error::DensityDim {
                    index,
                    expected: 0,
                    got: 1,
                })
            }
            (_, Some(got)) if got != expected => {
                return Err(Error::DensityDim {
                    index,
                    expected,
                    got,
                })
            }
            _ => {}
        }
        self.density.validate()
    }

    /// Splits `z` into on-manifold coordinates `x` and normal coordinates
    /// `y = z[d..] − v`.
    pub fn split(&self, z: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (x, rest) = z.split_at(self.dim);
        let y = rest.iter().zip(&self.offset).map(|(a, v)| a - v).collect();
        (x.to_vec(), y)
    }

    /// Inverse of [`split`](Self::split).
    pub fn join(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        x.iter()
            .copied()
            .chain(y.iter().zip(&self.offset).map(|(a, v)| a + v))
            .collect()
    }
}

/// Splits an evaluation point for `component`; see [`ManifoldComponent::split`].
pub fn component_split(component: &ManifoldComponent, z: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    check_point_dim(component.ambient_dim(), z)?;
    Ok(component.split(z))
}

/// Convex combination `Σ λ_i p_i` of flat components sharing an ambient space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelConfig", into = "ModelConfig")]
pub struct MixtureModel {
    ambient_dim: usize,
    components: Vec<ManifoldComponent>,
    weights: Vec<f64>,
}

/// Raw, unvalidated form of the JSON model schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub ambient_dim: usize,
    pub weights: Vec<f64>,
    pub components: Vec<ManifoldComponent>,
}

impl TryFrom<ModelConfig> for MixtureModel {
    type Error = Error;

    fn try_from(config: ModelConfig) -> Result<Self> {
        MixtureModel::new(config.ambient_dim, config.components, config.weights)
    }
}

impl From<MixtureModel> for ModelConfig {
    fn from(model: MixtureModel) -> Self {
        ModelConfig {
            ambient_dim: model.ambient_dim,
            weights: model.weights,
            components: model.components,
        }
    }
}

impl MixtureModel {
    pub fn new(
        ambient_dim: usize,
        components: Vec<ManifoldComponent>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        MixtureModel {
            ambient_dim,
            components,
            weights,
        }
        .validated()
    }

    /// Single-component model with unit weight.
    pub fn single(component: ManifoldComponent) -> Result<Self> {
        let ambient = component.ambient_dim();
        Self::new(ambient, vec![component], vec![1.0])
    }

    /// Re-checks every invariant and renormalizes the weights. Idempotent.
    pub fn validated(mut self) -> Result<Self> {
        if self.ambient_dim == 0 {
            return Err(Error::ZeroAmbientDim);
        }
        if self.components.is_empty() {
            return Err(Error::EmptyModel);
        }
        if self.weights.len() != self.components.len() {
            return Err(Error::WeightCount {
                weights: self.weights.len(),
                components: self.components.len(),
            });
        }
        for (index, component) in self.components.iter().enumerate() {
            component.validate(index, self.ambient_dim)?;
        }
        if let Some(first) = self.components.iter().find(|c| c.density.is_improper()) {
            let dim = first.dim;
            if self
                .components
                .iter()
                .any(|c| !c.density.is_improper() || c.dim != dim)
            {
                return Err(Error::ImproperMixture);
            }
        }
        for (index, &value) in self.weights.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite("weights"));
            }
            if value <= 0.0 {
                return Err(Error::NonPositiveWeight { index, value });
            }
        }
        let sum: f64 = self.weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_BAND {
            return Err(Error::WeightsNotNormalizable { sum });
        }
        if (sum - 1.0).abs() > NORMALIZED_EPS {
            for w in &mut self.weights {
                *w /= sum;
            }
        }
        Ok(self)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn components(&self) -> &[ManifoldComponent] {
        &self.components
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Smallest intrinsic dimension over all components.
    pub fn min_dim(&self) -> usize {
        self.components.iter().map(|c| c.dim).min().unwrap_or(0)
    }

    pub fn is_improper(&self) -> bool {
        self.components.iter().any(|c| c.density.is_improper())
    }

    pub fn check_point(&self, z: &[f64]) -> Result<()> {
        check_point_dim(self.ambient_dim, z)
    }
}

/// Free-function form of [`MixtureModel::validated`].
pub fn validate_model(model: MixtureModel) -> Result<MixtureModel> {
    model.validated()
}

pub(crate) fn check_point_dim(expected: usize, z: &[f64]) -> Result<()> {
    if z.len() != expected {
        return Err(Error::PointDim {
            expected,
            got: z.len(),
        });
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("evaluation point"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> ManifoldComponent {
        ManifoldComponent::gaussian(vec![1.0], vec![0.0]).unwrap()
    }

    #[test]
    fn minimal_model_is_valid() {
        let model = MixtureModel::new(2, vec![line()], vec![1.0]).unwrap();
        assert_eq!(model.weights(), &[1.0]);
        assert_eq!(model.ambient_dim(), 2);
    }

    #[test]
    fn weights_inside_band_are_renormalized() {
        let model = MixtureModel::new(2, vec![line(), line()], vec![0.5 + 4e-7, 0.5]).unwrap();
        let sum: f64 = model.weights().iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
        assert!((model.weights()[0] - model.weights()[1] - 4e-7).abs() < 1e-12);
    }

    #[test]
    fn weights_outside_band_are_rejected() {
        let err = MixtureModel::new(2, vec![line(), line()], vec![0.3, 0.3]).unwrap_err();
        assert!(matches!(err, Error::WeightsNotNormalizable { .. }));
        let err = MixtureModel::new(2, vec![line(), line()], vec![0.45, 0.45]).unwrap_err();
        assert!(err.to_string().contains("weights not normalizable"));
    }

    #[test]
    fn zero_sigma_is_rejected() {
        let err = ManifoldComponent::gaussian(vec![0.0], vec![0.0]).unwrap_err();
        assert!(matches!(err, Error::NonPositiveSigma { axis: 0, .. }));
        assert!(err.to_string().contains("non-positive sigma"));
    }

    #[test]
    fn structural_errors() {
        assert_eq!(
            MixtureModel::new(2, vec![], vec![]).unwrap_err(),
            Error::EmptyModel
        );
        assert!(matches!(
            MixtureModel::new(3, vec![line()], vec![1.0]).unwrap_err(),
            Error::OffsetLength { .. }
        ));
        assert!(matches!(
            MixtureModel::new(2, vec![line(), line()], vec![1.0, 0.0]).unwrap_err(),
            Error::NonPositiveWeight { index: 1, .. }
        ));
        assert!(matches!(
            ManifoldComponent::uniform_box(vec![(1.0, 1.0)], vec![]).unwrap_err(),
            Error::DegenerateBox { .. }
        ));
        assert!(matches!(
            ManifoldComponent::new(2, vec![0.0], DensitySpec::GaussianDiag { sigmas: vec![1.0] })
                .unwrap_err(),
            Error::DensityDim { .. }
        ));
        assert!(ManifoldComponent::new(1, vec![0.0], DensitySpec::Point).is_err());
    }

    #[test]
    fn improper_density_mixing_rules() {
        let c0 = ManifoldComponent::constant(1, vec![0.0]).unwrap();
        let c1 = ManifoldComponent::constant(1, vec![1.0]).unwrap();
        assert!(MixtureModel::new(2, vec![c0.clone(), c1], vec![0.5, 0.5]).is_ok());
        assert_eq!(
            MixtureModel::new(2, vec![c0, line()], vec![0.5, 0.5]).unwrap_err(),
            Error::ImproperMixture
        );
    }

    #[test]
    fn validation_is_idempotent() {
        let model = MixtureModel::new(2, vec![line(), line()], vec![0.3 + 1e-7, 0.7]).unwrap();
        let again = model.clone().validated().unwrap();
        assert_eq!(model, again);
    }

    #[test]
    fn split_examples() {
        let c = ManifoldComponent::gaussian(vec![1.0], vec![0.0, 1.0]).unwrap();
        assert_eq!(c.split(&[2.0, 0.0, 1.0]), (vec![2.0], vec![0.0, 0.0]));
        let p = ManifoldComponent::point(vec![0.0]).unwrap();
        assert_eq!(p.split(&[0.5]), (vec![], vec![0.5]));
        let full = ManifoldComponent::constant(2, vec![]).unwrap();
        assert_eq!(full.split(&[1.0, 2.0]), (vec![1.0, 2.0], vec![]));
        assert!(component_split(&full, &[1.0]).is_err());
    }

    #[test]
    fn psi_values() {
        let g = DensitySpec::GaussianDiag { sigmas: vec![1.0] };
        assert!((eval_psi(&g, &[0.0]) - 0.398_942_280_401_432_7).abs() < 1e-16);
        let b = DensitySpec::UniformBox {
            bounds: vec![(0.0, 2.0)],
        };
        assert_eq!(eval_psi(&b, &[1.0]), 0.5);
        assert_eq!(eval_psi(&b, &[3.0]), 0.0);
        assert_eq!(eval_psi(&DensitySpec::ConstantOne, &[1.0; 5]), 1.0);
    }

    #[test]
    fn json_schema_roundtrip() {
        let json = r#"{"ambient_dim": 2, "weights": [0.5, 0.5], "components": [
            {"dim": 1, "offset": [0.0], "density": {"type": "gaussian", "sigmas": [1.0]}},
            {"dim": 1, "offset": [1.0], "density": {"type": "box", "bounds": [[0.0, 1.0]]}}
        ]}"#;
        let model: MixtureModel = serde_json::from_str(json).unwrap();
        assert_eq!(model.len(), 2);
        let text = serde_json::to_string(&model).unwrap();
        let back: MixtureModel = serde_json::from_str(&text).unwrap();
        assert_eq!(model, back);

        let point = r#"{"ambient_dim": 1, "weights": [1], "components": [
            {"dim": 0, "offset": [0.5], "density": {"type": "point"}}]}"#;
        assert!(serde_json::from_str::<MixtureModel>(point).is_ok());
        let bad = r#"{"ambient_dim": 1, "weights": [0.9], "components": [
            {"dim": 0, "offset": [0.5], "density": {"type": "point"}}]}"#;
        assert!(serde_json::from_str::<MixtureModel>(bad).is_err());
    }
}
