//! Closed-form diffused densities, LIDL slopes and their numerical oracles
//! for mixtures of flat manifolds.
//!
//! A data distribution supported on a union of flat components is diffused
//! by a Wiener process for time `t`; the resulting density `ρ_t` solves the
//! heat equation `∂ρ/∂t = ½ Δρ`. The LIDL estimator reads the local
//! intrinsic dimension from the slope of `log ρ_t` against `log √t`, whose
//! exact value at finite `t` is
//!
//! ```text
//! β_t(z) = 2t ∂_t log ρ_t(z) = t Δρ_t(z) / ρ_t(z)
//! ```
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`model`] | components, mixtures, JSON schema, validation |
//! | [`analytic`] | closed forms for `ρ_t`, Laplacians and `β_t` |
//! | [`oracle`] | quadrature, Monte Carlo and finite-difference checks |
//! | [`estimator`] | LIDL regression, LID estimates, bias curves |
//! | [`catalog`] | built-in models used by figures and verification |

pub mod analytic;
pub mod catalog;
pub mod error;
pub mod estimator;
pub mod model;
pub mod oracle;
pub mod special;

pub use analytic::{BetaValue, LogDensity, MixtureBeta};
pub use error::{Error, Result};
pub use model::{DensitySpec, ManifoldComponent, MixtureModel};
