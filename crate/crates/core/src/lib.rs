//! Corner singularities of the two-material transmission problem with
//! sign-changing coefficients.

pub mod angular;
pub mod domain;
pub mod error;
pub mod fixtures;
pub mod mellin;
pub mod quadrature;
pub mod spectrum;
pub mod symbol;
pub mod transmission_1d;

pub use angular::{AngularFunction, AngularGrid, AngularSamples};
pub use domain::{CornerConfig, MaterialPair, Side};
pub use error::{Error, Result};
