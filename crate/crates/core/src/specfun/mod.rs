//! Complex special functions, generic over the floating point type.
//!
//! Everything here is written against [`Real`], implemented for `f32` and
//! `f64`. The tolerances quoted in tests are for `f64`.

mod gamma;
mod hyp2f1;
pub mod quad;
mod whittaker;

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

pub use gamma::{gamma, ln_gamma};
pub use hyp2f1::{hyp2f1, HYP2F1_RADIUS};
pub use whittaker::{whittaker_w, whittaker_w_asymptotic, whittaker_w_ode};

use crate::{Error, Result};

/// Scalar type the special-function kernel is generic over.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Accuracy target and work caps for the series and quadrature kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionBudget<T> {
    /// Target relative error.
    pub target: T,
    /// Cap on series terms.
    pub max_terms: usize,
    /// Cap on quadrature refinement levels (nodes double per level).
    pub max_levels: usize,
}

impl<T: Real> Default for PrecisionBudget<T> {
    fn default() -> Self {
        let floor = T::epsilon() * T::lit(64.0);
        PrecisionBudget {
            target: T::lit(1e-10).max(floor),
            max_terms: 20_000,
            max_levels: 12,
        }
    }
}

impl<T: Real> PrecisionBudget<T> {
    pub fn with_target(target: T) -> Result<Self> {
        if !(target > T::epsilon()) {
            return Err(Error::Invalid(format!(
                "precision target {target} must exceed machine epsilon"
            )));
        }
        Ok(PrecisionBudget { target, ..Self::default() })
    }
}

/// Principal argument in `(-π, π]`.
pub fn principal_arg<T: Real>(z: Complex<T>) -> T {
    let a = z.im.atan2(z.re);
    if a <= -T::PI() {
        T::PI()
    } else {
        a
    }
}

/// `base^{l/2}` on the principal branch, `arg(base) ∈ (-π, π]`.
pub fn half_power<T: Real>(base: Complex<T>, l: T) -> Result<Complex<T>> {
    if base.re == T::zero() && base.im == T::zero() {
        return Err(Error::Domain {
            function: "half_power",
            detail: "zero base".into(),
        });
    }
    let half = l / T::lit(2.0);
    let log = Complex::new(base.norm().ln(), principal_arg(base));
    Ok((log * half).exp())
}

/// `x^p` for real `x > 0` and complex `p`.
pub(crate) fn real_pow<T: Real>(x: T, p: Complex<T>) -> Complex<T> {
    (p * x.ln()).exp()
}

/// True when `z` is a non-positive integer (a pole of Gamma).
pub(crate) fn is_nonpositive_integer<T: Real>(z: Complex<T>) -> bool {
    z.im == T::zero() && z.re <= T::zero() && z.re == z.re.round()
}
