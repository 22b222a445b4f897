use num_complex::Complex;

use super::{is_nonpositive_integer, Real};
use crate::{Error, Result};

// Lanczos approximation, g = 7, nine terms.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn pole<T: Real>(z: Complex<T>) -> Error {
    Error::Pole {
        function: "gamma",
        at: format!("{z}"),
    }
}

// Returns (t, series) with Γ(z+1) = √(2π) t^{z+1/2} e^{-t} series, t = z + g + 1/2.
fn lanczos_parts<T: Real>(z: Complex<T>) -> (Complex<T>, Complex<T>) {
    let zm1 = z - T::one();
    let mut series = Complex::new(T::lit(LANCZOS[0]), T::zero());
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        series += Complex::new(T::lit(c), T::zero()) / (zm1 + T::lit(k as f64));
    }
    let t = zm1 + T::lit(LANCZOS_G + 0.5);
    (t, series)
}

/// Gamma function on the complex plane.
pub fn gamma<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    if is_nonpositive_integer(z) {
        return Err(pole(z));
    }
    let half = T::lit(0.5);
    if z.re < half {
        let s = (z * T::PI()).sin();
        if s.norm() == T::zero() {
            return Err(pole(z));
        }
        let g = gamma(Complex::new(T::one(), T::zero()) - z)?;
        return Ok(Complex::new(T::PI(), T::zero()) / (s * g));
    }
    let (t, series) = lanczos_parts(z);
    let zm1 = z - T::one();
    let sqrt_2pi = (T::PI() * T::lit(2.0)).sqrt();
    let v = t.powc(zm1 + half) * (-t).exp() * series * sqrt_2pi;
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::Domain {
            function: "gamma",
            detail: format!("overflow at {z}"),
        });
    }
    Ok(v)
}

/// A logarithm of Gamma (not branch-continuous in `z` across the negative axis).
pub fn ln_gamma<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    if is_nonpositive_integer(z) {
        return Err(pole(z));
    }
    let half = T::lit(0.5);
    if z.re < half {
        let s = (z * T::PI()).sin();
        if s.norm() == T::zero() {
            return Err(pole(z));
        }
        let lg = ln_gamma(Complex::new(T::one(), T::zero()) - z)?;
        return Ok(Complex::new(T::PI().ln(), T::zero()) - s.ln() - lg);
    }
    let (t, series) = lanczos_parts(z);
    let zm1 = z - T::one();
    let ln_sqrt_2pi = (T::PI() * T::lit(2.0)).sqrt().ln();
    Ok((zm1 + half) * t.ln() - t + series.ln() + ln_sqrt_2pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::quad::exp_sinh;
    use crate::specfun::PrecisionBudget;
    use rand::{Rng, SeedableRng};

    type C = Complex<f64>;

    fn rel(a: C, b: C) -> f64 {
        (a - b).norm() / b.norm()
    }

    // Independent oracle: Γ(z) = ∫₀^∞ t^{z-1} e^{-t} dt for Re z > 0.
    fn gamma_oracle(z: C) -> C {
        let b = PrecisionBudget::<f64>::with_target(1e-13).unwrap();
        exp_sinh(|t: f64| (C::new(t.ln(), 0.0) * (z - 1.0)).exp() * (-t).exp(), b)
            .unwrap()
            .value
    }

    #[test]
    fn small_integers_and_half() {
        assert!(rel(gamma(C::new(1.0, 0.0)).unwrap(), C::new(1.0, 0.0)) < 1e-14);
        assert!(rel(gamma(C::new(5.0, 0.0)).unwrap(), C::new(24.0, 0.0)) < 1e-13);
        let half = gamma(C::new(0.5, 0.0)).unwrap();
        assert!(rel(half, gamma_oracle(C::new(0.5, 0.0))) < 1e-10);
        assert!(rel(half, C::new(std::f64::consts::PI.sqrt(), 0.0)) < 1e-13);
    }

    #[test]
    fn lanczos_matches_quadrature_oracle() {
        for z in [C::new(0.7, 0.0), C::new(1.3, 2.0), C::new(3.5, -4.0), C::new(2.0, 8.0)] {
            assert!(rel(gamma(z).unwrap(), gamma_oracle(z)) < 1e-10, "z={z}");
        }
    }

    #[test]
    fn poles_are_rejected() {
        for k in 0..5 {
            let e = gamma(C::new(-(k as f64), 0.0)).unwrap_err();
            assert!(matches!(e, Error::Pole { .. }));
        }
        assert!(gamma(C::new(-1.0, 1e-3)).is_ok());
    }

    #[test]
    fn reflection_formula() {
        for z in [C::new(0.25, 0.3), C::new(-1.5, 0.0), C::new(-3.2, 1.1)] {
            let lhs = gamma(z).unwrap() * gamma(C::new(1.0, 0.0) - z).unwrap();
            let rhs = C::new(std::f64::consts::PI, 0.0) / (z * std::f64::consts::PI).sin();
            assert!(rel(lhs, rhs) < 1e-12);
        }
    }

    #[test]
    fn recurrence_on_random_strip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let z = C::new(rng.gen_range(0.1..5.0), rng.gen_range(-10.0..10.0));
            let g1 = gamma(z + 1.0).unwrap();
            assert!((g1 - z * gamma(z).unwrap()).norm() / g1.norm() <= 1e-9);
        }
    }

    #[test]
    fn ln_gamma_consistent() {
        for z in [C::new(0.3, 0.2), C::new(4.0, 30.0), C::new(-2.5, 0.5)] {
            let a = ln_gamma(z).unwrap().exp();
            assert!(rel(a, gamma(z).unwrap()) < 1e-11);
        }
        let big = ln_gamma(C::new(200.0, 0.0)).unwrap();
        assert!((big.re - 857.933_669_825_857_5).abs() < 1e-9);
    }

    #[test]
    fn single_precision() {
        let g = gamma(Complex::<f32>::new(5.0, 0.0)).unwrap();
        assert!((g.re - 24.0).abs() < 1e-3);
    }
}
