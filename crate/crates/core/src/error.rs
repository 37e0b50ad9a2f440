use thiserror::Error;

/// Errors raised while building models or evaluating densities.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("model has no components")]
    EmptyModel,

    #[error("ambient dimension must be positive")]
    ZeroAmbientDim,

    #[error("{weights} weights given for {components} components")]
    WeightCount { weights: usize, components: usize },

    #[error("non-positive weight {value} at component {index}")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("weights not normalizable: sum is {sum}")]
    WeightsNotNormalizable { sum: f64 },

    #[error("component {index}: intrinsic dimension {dim} exceeds ambient dimension {ambient}")]
    IntrinsicDim {
        index: usize,
        dim: usize,
        ambient: usize,
    },

    #[error("component {index}: offset has length {got}, expected {expected}")]
    OffsetLength {
        index: usize,
        expected: usize,
        got: usize,
    },

    #[error("component {index}: density has dimension {got}, expected {expected}")]
    DensityDim {
        index: usize,
        expected: usize,
        got: usize,
    },

    #[error("non-positive sigma {value} on axis {axis}")]
    NonPositiveSigma { axis: usize, value: f64 },

    #[error("degenerate box on axis {axis}: [{lower}, {upper}]")]
    DegenerateBox { axis: usize, lower: f64, upper: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("improper constant density can only be mixed with constant densities of equal dimension")]
    ImproperMixture,

    #[error("point has {got} coordinates, expected {expected}")]
    PointDim { expected: usize, got: usize },

    #[error("diffusion time must be positive and finite, got {0}")]
    InvalidTime(f64),

    #[error("density is exactly zero at the evaluation point")]
    Diverged,

    #[error("component dimension {dim} exceeds quadrature limit {max}")]
    QuadratureDim { dim: usize, max: usize },

    #[error("improper constant density cannot be sampled")]
    ImproperSampling,

    #[error("invalid settings: {0}")]
    InvalidSettings(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("regression needs at least two distinct abscissae")]
    DegenerateRegression,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTime(t))
    }
}
