//! Bifurcation analysis of the Jansen–Rit and Wendling–Chauvel neural mass
//! models: equilibria, codimension-two points, limit cycles and noisy-input
//! scenarios.

pub mod bifpoint;
pub mod codim2;
pub mod cycles;
pub mod equilibria;
pub mod error;
pub mod io;
pub mod linalg;
pub mod model;
pub mod scalar;
pub mod scenarios;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision instances used by the analyses.
pub type Jr = model::JrParams<f64>;
pub type Wc = model::WcParams<f64>;
pub type Dbt = model::DbtParams<f64>;
pub type AnyModel = model::Model<f64>;
pub type Mat = linalg::Matrix<f64>;
