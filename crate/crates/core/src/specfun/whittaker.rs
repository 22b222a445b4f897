use num_complex::Complex;

use super::quad::exp_sinh;
use super::{gamma, real_pow, PrecisionBudget, Real};
use crate::{Error, Result};

fn domain(detail: String) -> Error {
    Error::Domain {
        function: "whittaker_w",
        detail,
    }
}

/// Integral representation, valid for `Re(μ - κ + 1/2) > 0`:
/// `W = e^{-x/2} x^κ / Γ(μ-κ+1/2) ∫₀^∞ u^{μ-κ-1/2} (1+u/x)^{μ+κ-1/2} e^{-u} du`.
pub(crate) fn whittaker_integral<T: Real>(
    kappa: Complex<T>,
    mu: Complex<T>,
    x: T,
    budget: PrecisionBudget<T>,
) -> Result<Complex<T>> {
    let half = T::lit(0.5);
    let p = mu - kappa - half;
    let q = mu + kappa - half;
    if !(p.re > -T::one()) {
        return Err(domain(format!("Re(b - a + 1/2) = {} is not positive", p.re + T::one())));
    }
    let inner = exp_sinh(
        |u: T| real_pow(u, p) * real_pow(T::one() + u / x, q) * (-u).exp(),
        budget,
    )?;
    let g = gamma(p + T::one())?;
    Ok(real_pow(x, kappa) * (-x * half).exp() * inner.value / g)
}

/// Whittaker `W_{a,b}(x)` for real `x > 0` by the integral representation,
/// using `W_{a,b} = W_{a,-b}` when only `-b` satisfies the convergence condition.
pub fn whittaker_w<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    x: T,
    budget: PrecisionBudget<T>,
) -> Result<Complex<T>> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(domain(format!("argument {x} is not a positive real")));
    }
    let half = T::lit(0.5);
    if (b - a).re + half > T::zero() {
        whittaker_integral(a, b, x, budget)
    } else if (-b - a).re + half > T::zero() {
        whittaker_integral(a, -b, x, budget)
    } else {
        Err(domain(format!(
            "neither Re(±b - a + 1/2) is positive for a = {a}, b = {b}"
        )))
    }
}

/// Asymptotic expansion `e^{-x/2} x^a Σ (1/2+b-a)_s (1/2-b-a)_s / s! (-x)^{-s}`
/// and its derivative, summed up to the smallest term.
///
/// Returns `(W, W', last term relative size)`, both values divided by `e^{-x/2}`.
fn asymptotic_scaled<T: Real>(a: Complex<T>, b: Complex<T>, x: T) -> (Complex<T>, Complex<T>, T) {
    let half = T::lit(0.5);
    let p = b - a + half;
    let q = -b - a + half;
    let xa = real_pow(x, a);
    let one = Complex::new(T::one(), T::zero());
    let mut coeff = one;
    let mut s_sum = one;
    let mut d_sum = (a / x) * one;
    let mut last = T::one();
    let mut prev = T::infinity();
    for s in 0..400usize {
        let sf = T::lit(s as f64);
        coeff = coeff * (p + sf) * (q + sf) / ((sf + T::one()) * (-x));
        let size = coeff.norm();
        if size >= prev && size > T::epsilon() {
            break;
        }
        prev = size;
        let s1 = sf + T::one();
        s_sum += coeff;
        d_sum += coeff * ((a - s1) / x);
        last = size;
        if size < T::epsilon() * T::lit(1e-3) {
            break;
        }
    }
    // W e^{x/2} = x^a S and (W e^{x/2})' = x^a Σ c_s x^{-s} (a - s)/x.
    (xa * s_sum, xa * d_sum, last)
}

/// Leading asymptotic value of `W_{a,b}(x)` summed to the smallest term.
pub fn whittaker_w_asymptotic<T: Real>(a: Complex<T>, b: Complex<T>, x: T) -> Complex<T> {
    let (u, _, _) = asymptotic_scaled(a, b, x);
    u * (-x / T::lit(2.0)).exp()
}

type State<T> = [Complex<T>; 2];

// U = W e^{x/2} solves U'' = U' + (-a/x + (b² - 1/4)/x²) U.
fn rhs<T: Real>(a: Complex<T>, b2q: Complex<T>, x: T, y: &State<T>) -> State<T> {
    [y[1], y[1] + (-a / x + b2q / (x * x)) * y[0]]
}

/// Second construction of `W_{a,b}(x)`: start from the asymptotic expansion
/// far out on the real axis and integrate the Whittaker equation back to `x`
/// with an embedded Runge–Kutta 5(4) pair. Valid for every `a, b`.
pub fn whittaker_w_ode<T: Real>(a: Complex<T>, b: Complex<T>, x: T, rtol: T) -> Result<Complex<T>> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(domain(format!("argument {x} is not a positive real")));
    }
    let mut start = T::lit(40.0) + T::lit(4.0) * (a.norm() + b.norm_sqr());
    let (u0, du0) = loop {
        let (u, du, last) = asymptotic_scaled(a, b, start.max(x));
        if last < T::epsilon() * T::lit(0.1) {
            break (u, du);
        }
        start = start * T::lit(1.5);
        if start > T::lit(1200.0) {
            return Err(domain("asymptotic start point not found".into()));
        }
    };
    if start <= x {
        return Ok(u0 * (-x / T::lit(2.0)).exp());
    }
    let b2q = b * b - T::lit(0.25);
    let mut y: State<T> = [u0, du0];
    let mut t = start;
    let mut h = -T::lit(0.05).min((start - x) / T::lit(4.0));

    const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 6] = [
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
    let zero = Complex::new(T::zero(), T::zero());
    for _ in 0..2_000_000 {
        if t <= x {
            break;
        }
        if t + h < x {
            h = x - t;
        }
        let mut k: [State<T>; 7] = [[zero; 2]; 7];
        k[0] = rhs(a, b2q, t, &y);
        for stage in 1..7 {
            let mut ys = y;
            for j in 0..stage {
                let c = T::lit(A[stage - 1][j]) * h;
                ys[0] += k[j][0] * c;
                ys[1] += k[j][1] * c;
            }
            k[stage] = rhs(a, b2q, t + T::lit(C[stage - 1]) * h, &ys);
        }
        let mut y_new = y;
        for j in 0..6 {
            let c = T::lit(A[5][j]) * h;
            y_new[0] += k[j][0] * c;
            y_new[1] += k[j][1] * c;
        }
        let mut err = T::zero();
        for comp in 0..2 {
            let mut e = zero;
            for j in 0..7 {
                e += k[j][comp] * (T::lit(E[j]) * h);
            }
            let sc = rtol * y[comp].norm().max(y_new[comp].norm()) + T::min_positive_value();
            err = err.max(e.norm() / sc);
        }
        if err <= T::one() {
            t += h;
            y = y_new;
        }
        let factor = if err == T::zero() {
            T::lit(5.0)
        } else {
            (T::lit(0.9) * err.powf(T::lit(-0.2))).min(T::lit(5.0)).max(T::lit(0.2))
        };
        h = h * factor;
        if h.abs() < T::epsilon() * t.abs() {
            return Err(Error::Quadrature(format!("Whittaker ODE step collapsed at x = {t}")));
        }
    }
    if t > x {
        return Err(Error::Quadrature("Whittaker ODE step budget exhausted".into()));
    }
    Ok(y[0] * (-x / T::lit(2.0)).exp())
}
