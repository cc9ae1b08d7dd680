//! Fourier analysis for distributions that are derivatives of continuous
//! functions on the circle, computed through their primitives.

pub mod analysis;
pub mod bv;
pub mod catalog;
pub mod convolution;
pub mod error;
pub mod fourier;
pub mod kernels;
pub mod norm;
pub mod primitive;
pub mod quad;
pub mod special;
pub mod trig;

pub use bv::{BvFunction, VariationReport};
pub use catalog::{catalog, CatalogEntry, CatalogName};
pub use convolution::{convolve_bv, convolve_l1, BvConvolution, L1Function, PeriodicFunction};
pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use fourier::{coeff, coeffs, FourierCoeffs};
pub use kernels::{kernel, KernelKind};
pub use primitive::{Angle, DistributionAc, Primitive};
pub use trig::TrigPoly;

/// Library version, echoed in experiment metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
