//! Spectral fractional powers of elliptic operators and their
//! Caffarelli–Silvestre extension.

pub mod analysis;
pub mod cli;
pub mod eigensolve;
pub mod error;
pub mod extension;
pub mod operators;
pub mod reference;
pub mod specfun;
pub mod suite;

pub use error::{Error, Result};

/// Field of nodal values and coefficients: `f64` or `Complex64`.
pub trait Scalar: nalgebra::ComplexField<RealField = f64> + Copy {}

impl<T: nalgebra::ComplexField<RealField = f64> + Copy> Scalar for T {}
