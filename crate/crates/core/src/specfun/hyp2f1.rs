use num_complex::Complex;

use super::{is_nonpositive_integer, PrecisionBudget, Real};
use crate::{Error, Result};

/// Largest `|z|` accepted by [`hyp2f1`].
pub const HYP2F1_RADIUS: f64 = 0.8;

/// Gauss hypergeometric function `₂F₁(a, b; c; z)` for `|z| ≤ 0.8` by its
/// power series, stopped once a geometric bound on the tail is below target.
pub fn hyp2f1<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    z: Complex<T>,
    budget: PrecisionBudget<T>,
) -> Result<Complex<T>> {
    if is_nonpositive_integer(c) {
        return Err(Error::Pole {
            function: "hyp2f1",
            at: format!("c = {c}"),
        });
    }
    let r = z.norm();
    if r > T::lit(HYP2F1_RADIUS) * (T::one() + T::epsilon() * T::lit(4.0)) {
        return Err(Error::Domain {
            function: "hyp2f1",
            detail: format!("|z| = {r} exceeds {HYP2F1_RADIUS}"),
        });
    }
    let one = Complex::new(T::one(), T::zero());
    let mut sum = one;
    let mut term = one;
    for k in 0..budget.max_terms {
        let kf = T::lit(k as f64);
        let ratio_c = (a + kf) * (b + kf) / ((c + kf) * (kf + T::one()));
        term = term * ratio_c * z;
        sum += term;
        if term.norm() == T::zero() {
            return Ok(sum);
        }
        // Bound the ratio of every later term by its value at k + 1 when it
        // is already below one; the ratio tends to |z| monotonically from there
        // once k exceeds the parameter sizes.
        let kn = kf + T::one();
        let next = ((a + kn) * (b + kn) / ((c + kn) * (kn + T::one()))).norm() * r;
        let rho = next.max(r);
        let settled = kn > a.norm() + b.norm() + c.norm();
        if settled && rho < T::one() {
            let tail = term.norm() * rho / (T::one() - rho);
            if tail <= budget.target * sum.norm() * T::lit(0.1) {
                return Ok(sum);
            }
        }
    }
    Err(Error::Domain {
        function: "hyp2f1",
        detail: format!("series did not converge in {} terms", budget.max_terms),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    type C = Complex<f64>;

    fn b() -> PrecisionBudget<f64> {
        PrecisionBudget::with_target(1e-13).unwrap()
    }

    fn raw_series(a: f64, bb: f64, c: f64, z: f64, n: usize) -> f64 {
        let (mut s, mut t) = (1.0, 1.0);
        for k in 0..n {
            let k = k as f64;
            t *= (a + k) * (bb + k) / ((c + k) * (k + 1.0)) * z;
            s += t;
        }
        s
    }

    #[test]
    fn examples() {
        let one = C::new(1.0, 0.0);
        let v = hyp2f1(C::new(0.3, 1.0), C::new(-2.0, 0.5), C::new(1.5, 0.0), C::new(0.0, 0.0), b()).unwrap();
        assert_eq!(v, one);
        let v = hyp2f1(one, one, C::new(2.0, 0.0), C::new(0.5, 0.0), b()).unwrap();
        assert!((v.re - 2.0 * 2f64.ln()).abs() < 1e-9);
        assert!((v.re - raw_series(1.0, 1.0, 2.0, 0.5, 200)).abs() < 1e-12);
        let v = hyp2f1(one, C::new(3.0, 0.0), C::new(3.0, 0.0), C::new(0.3, 0.0), b()).unwrap();
        assert!((v.re - 1.0 / 0.7).abs() < 1e-9);
    }

    #[test]
    fn domain_and_pole_errors() {
        let one = C::new(1.0, 0.0);
        assert!(matches!(
            hyp2f1(one, one, C::new(-2.0, 0.0), C::new(0.1, 0.0), b()),
            Err(Error::Pole { .. })
        ));
        assert!(matches!(
            hyp2f1(one, one, C::new(2.0, 0.0), C::new(0.81, 0.0), b()),
            Err(Error::Domain { .. })
        ));
        assert!(hyp2f1(one, one, C::new(2.0, 0.0), C::new(0.0, 0.8), b()).is_ok());
    }

    #[test]
    fn complex_closed_forms() {
        // F(a, b; b; z) = (1 - z)^{-a} with complex a and z.
        let a = C::new(2.5, -1.5);
        let z = C::new(0.5, 0.45);
        let v = hyp2f1(a, C::new(0.7, 0.2), C::new(0.7, 0.2), z, b()).unwrap();
        let exact = (C::new(1.0, 0.0) - z).powc(-a);
        assert!((v - exact).norm() / exact.norm() < 1e-10);
    }

    #[test]
    fn gauss_contiguous_relation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let a = C::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let bb = C::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let c = C::new(rng.gen_range(0.5..4.0), rng.gen_range(-3.0..3.0));
            let z = C::from_polar(rng.gen_range(0.0..0.8), rng.gen_range(-3.1..3.1));
            let f = |a, c| hyp2f1(a, bb, c, z, b()).unwrap();
            let g = hyp2f1(a + 1.0, bb + 1.0, c + 1.0, z, b()).unwrap();
            let lhs = c * f(a, c) - c * f(a + 1.0, c) + bb * z * g;
            let scale = (c * f(a, c)).norm().max(1.0);
            assert!(lhs.norm() / scale < 1e-8, "residual {}", lhs.norm());
        }
    }
}
