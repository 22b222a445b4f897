//! Quadrature kernels: double-exponential on half lines, adaptive
//! Gauss–Kronrod on finite intervals, and Gauss–Legendre rules.

use num_complex::Complex;

use super::{PrecisionBudget, Real};
use crate::{Error, Result};

/// Value of an integral with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: Complex<T>,
    pub error: T,
    pub evaluations: usize,
}

/// Pairwise summation; the grouping depends only on the length, so results are
/// reproducible regardless of how the terms were produced.
pub fn pairwise_sum<T: Real>(terms: &[Complex<T>]) -> Complex<T> {
    match terms.len() {
        0 => Complex::new(T::zero(), T::zero()),
        1 => terms[0],
        n if n <= 8 => terms.iter().fold(Complex::new(T::zero(), T::zero()), |a, &b| a + b),
        n => {
            let (l, r) = terms.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

fn finite<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// `∫₀^∞ f(x) dx` by the exp-sinh substitution `x = exp(π/2 · sinh t)`.
///
/// Suited to integrands with algebraic behaviour at 0 and exponential decay
/// at infinity.
pub fn exp_sinh<T: Real, F>(f: F, budget: PrecisionBudget<T>) -> Result<QuadResult<T>>
where
    F: Fn(T) -> Complex<T>,
{
    exp_sinh_from(T::zero(), f, budget)
}

/// `∫_a^∞ f(x) dx` by exp-sinh applied to `x - a`.
pub fn exp_sinh_from<T: Real, F>(a: T, f: F, budget: PrecisionBudget<T>) -> Result<QuadResult<T>>
where
    F: Fn(T) -> Complex<T>,
{
    let half_pi = T::FRAC_PI_2();
    let mut evals = 0usize;
    let term = |t: T, evals: &mut usize| -> Complex<T> {
        let e = half_pi * t.sinh();
        let x = e.exp();
        if x == T::zero() || !x.is_finite() {
            return Complex::new(T::zero(), T::zero());
        }
        *evals += 1;
        let v = f(a + x) * (half_pi * t.cosh() * x);
        if finite(v) {
            v
        } else {
            Complex::new(T::nan(), T::nan())
        }
    };

    // Determine the truncation window on the coarse grid.
    let h0 = T::lit(0.5);
    let tiny = T::epsilon() * T::lit(1e-3);
    let centre = term(T::zero(), &mut evals);
    if !finite(centre) {
        return Err(Error::Quadrature("exp-sinh: non-finite integrand at x = a + 1".into()));
    }
    let mut coarse = vec![centre];
    let mut scale = centre.norm();
    let mut bounds = [T::zero(); 2];
    for (side, sign) in [T::one(), -T::one()].into_iter().enumerate() {
        let mut small_run = 0;
        let mut k = 1;
        loop {
            let t = sign * h0 * T::lit(k as f64);
            let v = term(t, &mut evals);
            if !finite(v) {
                if small_run >= 2 {
                    break;
                }
                return Err(Error::Quadrature(format!(
                    "exp-sinh: non-finite integrand at t = {t} before decay"
                )));
            }
            scale = scale.max(v.norm());
            coarse.push(v);
            if v.norm() <= tiny * scale {
                small_run += 1;
            } else {
                small_run = 0;
            }
            bounds[side] = t;
            if small_run >= 3 || k > 80 {
                break;
            }
            k += 1;
        }
    }
    let (t_hi, t_lo) = (bounds[0], bounds[1]);

    let mut h = h0;
    let mut sum = pairwise_sum(&coarse);
    let mut estimate = sum * h;
    let mut err = T::infinity();
    for _ in 0..budget.max_levels {
        let h_new = h / T::lit(2.0);
        let mut odd = Vec::new();
        let mut t = t_lo + h_new;
        while t < t_hi {
            let v = term(t, &mut evals);
            if finite(v) {
                odd.push(v);
            }
            t += h;
        }
        sum += pairwise_sum(&odd);
        h = h_new;
        let next = sum * h;
        err = (next - estimate).norm();
        estimate = next;
        if err <= budget.target * estimate.norm() || err <= tiny * scale {
            return Ok(QuadResult { value: estimate, error: err, evaluations: evals });
        }
    }
    Err(Error::Quadrature(format!(
        "exp-sinh did not reach {} (last change {err})",
        budget.target
    )))
}

// 15-point Kronrod nodes and weights on [-1, 1] with embedded 7-point Gauss.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod_segment<T: Real, F>(f: &F, a: T, b: T) -> (Complex<T>, T)
where
    F: Fn(T) -> Complex<T>,
{
    let c = (a + b) / T::lit(2.0);
    let r = (b - a) / T::lit(2.0);
    let fc = f(c);
    let mut k = fc * T::lit(WGK[7]);
    let mut g = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = r * T::lit(XGK[j]);
        let pair = f(c - dx) + f(c + dx);
        k += pair * T::lit(WGK[j]);
        if j % 2 == 1 {
            g += pair * T::lit(WG[j / 2]);
        }
    }
    (k * r, ((k - g) * r).norm())
}

/// Globally adaptive 7/15-point Gauss–Kronrod on `[a, b]`.
pub fn gauss_kronrod<T: Real, F>(f: F, a: T, b: T, budget: PrecisionBudget<T>) -> Result<QuadResult<T>>
where
    F: Fn(T) -> Complex<T>,
{
    let max_segments = budget.max_terms.max(1);
    let mut segs = vec![(a, b, kronrod_segment(&f, a, b))];
    let mut evals = 15;
    loop {
        let total: Complex<T> = pairwise_sum(&segs.iter().map(|s| s.2 .0).collect::<Vec<_>>());
        let err = segs.iter().fold(T::zero(), |acc, s| acc + s.2 .1);
        if !finite(total) {
            return Err(Error::Quadrature("Gauss–Kronrod: non-finite integrand".into()));
        }
        if err <= budget.target * total.norm() || err <= T::epsilon() * T::lit(10.0) * (b - a).abs() {
            return Ok(QuadResult { value: total, error: err, evaluations: evals });
        }
        if segs.len() >= max_segments {
            return Err(Error::Quadrature(format!(
                "Gauss–Kronrod: {max_segments} segments, error estimate {err}"
            )));
        }
        let worst = (0..segs.len())
            .max_by(|&i, &j| segs[i].2 .1.partial_cmp(&segs[j].2 .1).unwrap_or(std::cmp::Ordering::Equal))
            .expect("non-empty");
        let (lo, hi, _) = segs.swap_remove(worst);
        let mid = (lo + hi) / T::lit(2.0);
        segs.push((lo, mid, kronrod_segment(&f, lo, mid)));
        segs.push((mid, hi, kronrod_segment(&f, mid, hi)));
        evals += 30;
    }
}

/// Composite 7/15-point Gauss–Kronrod rule on `[a, b]` with `panels` equal
/// panels, as `(node, kronrod weight, embedded gauss weight)` triples. The
/// gauss weight is zero on kronrod-only nodes.
pub fn kronrod_panels<T: Real>(a: T, b: T, panels: usize) -> Vec<(T, T, T)> {
    let panels = panels.max(1);
    let width = (b - a) / T::lit(panels as f64);
    let mut out = Vec::with_capacity(15 * panels);
    for p in 0..panels {
        let lo = a + width * T::lit(p as f64);
        let c = lo + width / T::lit(2.0);
        let r = width / T::lit(2.0);
        for j in 0..7 {
            let g = if j % 2 == 1 { T::lit(WG[j / 2]) * r } else { T::zero() };
            let wk = T::lit(WGK[j]) * r;
            out.push((c - r * T::lit(XGK[j]), wk, g));
            out.push((c + r * T::lit(XGK[j]), wk, g));
        }
        out.push((c, T::lit(WGK[7]) * r, T::lit(WG[3]) * r));
    }
    out
}

/// `n`-point Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = T::lit(-x);
        nodes[n - 1 - i] = T::lit(x);
        weights[i] = T::lit(w);
        weights[n - 1 - i] = T::lit(w);
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    #[test]
    fn exp_sinh_known_integrals() {
        let b = PrecisionBudget::<f64>::default();
        let r = exp_sinh(|x: f64| C::new((-x).exp(), 0.0), b).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-12);
        let r = exp_sinh(|x: f64| C::new((-x).exp() / x.sqrt(), 0.0), b).unwrap();
        assert!((r.value.re - std::f64::consts::PI.sqrt()).abs() < 1e-11);
        let r = exp_sinh(|x: f64| C::new(1.0 / (1.0 + x * x), 0.0), b).unwrap();
        assert!((r.value.re - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
        let r = exp_sinh_from(2.0, |x: f64| C::new((-x).exp(), 0.0), b).unwrap();
        assert!((r.value.re - (-2.0f64).exp()).abs() < 1e-13);
    }

    #[test]
    fn gauss_kronrod_oscillatory() {
        let b = PrecisionBudget::<f64>::default();
        let r = gauss_kronrod(|x: f64| C::new(0.0, x).exp(), 0.0, 10.0, b).unwrap();
        let exact = (C::new(0.0, 10.0).exp() - 1.0) / C::new(0.0, 1.0);
        assert!((r.value - exact).norm() < 1e-10);
        let r = gauss_kronrod(|x: f64| C::new(x.sqrt(), 0.0), 0.0, 1.0, b).unwrap();
        assert!((r.value.re - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        for n in [1usize, 2, 5, 12, 40] {
            let (x, w) = gauss_legendre::<f64>(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            let deg = 2 * n - 1;
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((s - exact).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn kronrod_panels_integrate_exponential() {
        let rule = kronrod_panels(-1.0f64, 2.0, 7);
        assert_eq!(rule.len(), 105);
        let k: f64 = rule.iter().map(|(x, wk, _)| wk * x.exp()).sum();
        let g: f64 = rule.iter().map(|(x, _, wg)| wg * x.exp()).sum();
        let exact = 2f64.exp() - (-1f64).exp();
        assert!((k - exact).abs() < 1e-14);
        assert!((g - exact).abs() < 1e-10);
    }

    #[test]
    fn pairwise_sum_is_order_independent_of_producer() {
        let v: Vec<C> = (0..1000).map(|k| C::new(1.0 / (k as f64 + 1.0), 0.0)).collect();
        let s = pairwise_sum(&v);
        let direct: f64 = v.iter().map(|z| z.re).sum();
        assert!((s.re - direct).abs() < 1e-12);
    }
}
