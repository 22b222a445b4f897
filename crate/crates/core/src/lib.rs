//! Numerical toolkit for half-integral weight Eisenstein series on Γ₀(4N).
//!
//! The crate is layered bottom-up:
//!
//! * [`arith`]: Kronecker symbols, Dirichlet characters, Gauss sums.
//! * [`specfun`]: Gamma, ₂F₁, Whittaker W and principal-branch powers,
//!   generic over the floating point type.
//! * [`modgroup`]: Γ₀(4N) matrices, cusps, scaling matrices, coset
//!   representatives and generators.
//! * [`automorphy`]: automorphy factor, slash operator, the consistency
//!   factor `r(M, N)` and the theta multiplier system.
//! * [`eisenstein`]: truncated Eisenstein series at singular cusps, Fourier
//!   coefficient extraction and scattering matrices.
//! * [`lfunc`]: character twists, the Fricke check function, completed
//!   L-functions by the Gamma-hypergeometric tensor and by Mellin quadrature.
//! * [`converse`]: reconstruction of modular functions from coefficient
//!   data, contour shifting, and the finite-data validator.
//! * [`report`]: the verification record every check emits.

pub mod arith;
pub mod automorphy;
pub mod converse;
pub mod eisenstein;
pub mod error;
#[cfg(test)]
mod fixtures;
pub mod lfunc;
pub mod modgroup;
pub mod report;
pub mod specfun;

pub use error::{Error, Result};

use num_complex::Complex;

/// Double precision complex number, the working type of the analytic layers.
pub type C64 = Complex<f64>;
/// Single precision complex number.
pub type C32 = Complex<f32>;

/// Special-function precision budget in double precision.
pub type Budget64 = specfun::PrecisionBudget<f64>;
/// Special-function precision budget in single precision.
pub type Budget32 = specfun::PrecisionBudget<f32>;

pub use automorphy::{SlashContext, WeightClass};
pub use modgroup::{Cusp, ModularMatrix, RealMatrix, ScalingMatrix};
