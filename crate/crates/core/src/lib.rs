//! Noise, standard-quantum-limit and sensing model of a cavity read out by
//! two mechanically coupled oscillators.
//!
//! All routines are generic over [`Real`] (`f32` or `f64`). The aliases at
//! the crate root fix the scalar to `f64`.

pub mod coefficients;
pub mod error;
pub mod linalg;
pub mod model;
pub mod optimize;
pub mod presets;
pub mod scalar;
pub mod sensing;
pub mod spectra;
pub mod sql;

pub use error::{Error, Result};
pub use scalar::{Cplx, Real};

pub type Params = model::DetectorParams<f64>;
pub type Params32 = model::DetectorParams<f32>;
pub type Coefficients = coefficients::OutputCoefficients<f64>;
pub type Spectrum = spectra::SpectrumResult<f64>;
pub type Search = spectra::OmegaSearch<f64>;
pub type Sql = sql::SqlResult<f64>;
pub type Sweep = sql::SweepResult<f64>;
pub type Report = sensing::SensingReport<f64>;
