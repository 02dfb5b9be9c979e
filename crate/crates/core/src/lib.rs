//! Numerical laboratory for convolution measures of surface-carried
//! measures, sharp Fourier extension functionals, delta-calculus
//! integration on implicit manifolds, and spectral analysis on spheres.

pub mod besselmix;
pub mod config;
pub mod convolution;
pub mod delta;
pub mod error;
pub mod extension;
pub mod output;
pub mod quad;
pub mod scalar;
pub mod special;
pub mod spectral;
pub mod surfaces;

pub use config::QuadratureSpec;
pub use error::{Error, Result};
pub use scalar::{Real, Scalar};
