use super::*;
use crate::arith::{dual_character, enumerate_characters};
use crate::fixtures::level4;
use crate::specfun::quad::gauss_kronrod;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn nontrivial(d: u64) -> DirichletCharacter {
    enumerate_characters(d).into_iter().find(|c| !c.is_principal()).unwrap()
}

fn sample_points(seed: u64, n: usize, y: (f64, f64)) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(y.0..y.1)))
        .collect()
}

#[test]
fn twist_by_trivial_character_is_identity() {
    let f = &level4().expansions[0][0];
    let t = twist(f, &DirichletCharacter::principal(1)).unwrap();
    assert_eq!(t.expansion(), f);
}

#[test]
fn twist_scales_constant_pair_by_tau0() {
    let f = &level4().expansions[0][0];
    for chi in enumerate_characters(5) {
        let t = twist(f, &chi).unwrap();
        let tau0 = gauss_sum(&chi, 0);
        assert!((t.expansion().a - tau0 * f.a).norm() < 1e-15);
        assert!((t.expansion().b - tau0 * f.b).norm() < 1e-15);
    }
}

#[test]
fn twist_rejects_modulus_sharing_a_factor_with_level() {
    let f = &level4().expansions[0][0];
    assert!(twist(f, &DirichletCharacter::principal(6)).is_err());
}

#[test]
fn twist_coefficient_form_matches_translates() {
    let f = &level4().expansions[0][0];
    for chi in enumerate_characters(3) {
        let t = twist(f, &chi).unwrap();
        for z in sample_points(3, 10, (0.4, 1.2)) {
            let a = t.eval(z).unwrap();
            let b = t.eval_translates(z).unwrap();
            assert!((a - b).norm() <= 1e-6 * (1.0 + a.norm()), "z={z}: {a} vs {b}");
        }
    }
}

#[test]
fn check_function_is_an_involution() {
    let fx = level4();
    let e = &fx.series[0];
    let f = |z: C64| e.value(z);
    let once = check_function(f, Weight::HALF, 4);
    let twice = check_function(&once, Weight::HALF, 4);
    for z in sample_points(11, 10, (0.3, 1.5)) {
        let r = (twice(z) - e.value(z)).norm() / e.value(z).norm();
        assert!(r < 1e-9, "z={z}: {r}");
    }
}

#[test]
fn check_function_on_imaginary_axis() {
    let e = &level4().series[0];
    let chk = check_function(|z| e.value(z), Weight::HALF, 4);
    for y in [0.5, 1.0, 2.0] {
        let lhs = chk(C64::new(0.0, y));
        let rhs = e.value(C64::new(0.0, 1.0 / (4.0 * y)));
        assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm(), "y={y}");
    }
}

#[test]
fn check_expansion_matches_fricke_slash() {
    let fx = level4();
    let e = &fx.series[0];
    let chk = check_function(|z| e.value(z), Weight::HALF, 4);
    let ex = check_expansion(&fx.expansions[0][1]);
    for z in sample_points(5, 10, (0.5, 1.5)) {
        let a = chk(z);
        let b = ex.eval(z).unwrap();
        assert!((a - b).norm() <= 1e-6 * a.norm(), "z={z}: {a} vs {b}");
    }
}

#[test]
fn h_factor_examples() {
    for level in [4, 8, 12] {
        for l in [Weight::HALF, Weight::THREE_HALVES] {
            let h = h_factor(&DirichletCharacter::principal(1), level, l, 0.0).unwrap();
            assert!((h - C64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }
    let h = h_factor(&nontrivial(3), 4, Weight::HALF, 0.0).unwrap();
    assert!((h - C64::new(0.0, 1.0)).norm() < 1e-15, "{h}");
    assert!(h_factor(&nontrivial(3), 4, Weight::HALF, 0.9).is_err());
}

proptest! {
    #[test]
    fn h_factor_is_unimodular(d in prop::sample::select(vec![1u64, 3, 5, 7, 9, 11, 13]), k in 0usize..12, u in -0.79f64..0.79, three in any::<bool>()) {
        let chars = enumerate_characters(d);
        let chi = &chars[k % chars.len()];
        let l = if three { Weight::THREE_HALVES } else { Weight::HALF };
        let h = h_factor(chi, 4, l, u).unwrap();
        prop_assert!((h.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn l_series_is_linear(c1 in prop::collection::vec(-1.0f64..1.0, 8), c2 in prop::collection::vec(-1.0f64..1.0, 8), t in -2.0f64..2.0) {
        let base = &level4().expansions[0][0];
        let with = |c: &[f64]| {
            let mut e = base.clone();
            e.coeffs.clear();
            for (k, n) in [-4i64, -3, -2, -1, 1, 2, 3, 4].iter().enumerate() {
                e.coeffs.insert(*n, C64::new(c[k], 0.5 * c[(k + 3) % 8]));
            }
            e
        };
        let (e1, e2) = (with(&c1), with(&c2));
        let sum: Vec<f64> = c1.iter().zip(&c2).map(|(a, b)| a + t * b).collect();
        let e3 = with(&sum);
        let chi = nontrivial(5);
        let s = C64::new(2.5, 1.0);
        for sign in [Sign::Plus, Sign::Minus] {
            let lhs = l_series(&e3, &chi, sign, s);
            let rhs = l_series(&e1, &chi, sign, s) + t * l_series(&e2, &chi, sign, s);
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }
    }
}

#[test]
fn l_series_examples() {
    let mut e = level4().expansions[0][0].clone();
    let one = DirichletCharacter::principal(1);
    e.coeffs.values_mut().for_each(|v| *v = C64::new(0.0, 0.0));
    assert_eq!(l_series(&e, &one, Sign::Plus, C64::new(2.0, 0.0)), C64::new(0.0, 0.0));
    e.coeffs.insert(1, C64::new(1.0, 0.0));
    assert!((l_series(&e, &one, Sign::Plus, C64::new(2.0, 0.0)) - 1.0).norm() < 1e-15);
    assert_eq!(l_series(&e, &one, Sign::Minus, C64::new(2.0, 0.0)), C64::new(0.0, 0.0));
}

/// `₂F₁(a, b; c; z)/Γ(c)` from Euler's integral (needs `Re c > Re a > 0`).
fn euler_f_over_gamma(a: f64, b: f64, c: f64, z: C64) -> C64 {
    let budget = PrecisionBudget::with_target(1e-13).unwrap();
    let r = gauss_kronrod(
        |t: f64| (t.powf(a - 1.0) * (1.0 - t).powf(c - a - 1.0)) * (C64::new(1.0, 0.0) - z * t).powc(C64::new(-b, 0.0)),
        0.0,
        1.0,
        budget,
    )
    .unwrap();
    r.value / (gamma(C64::new(a, 0.0)).unwrap() * gamma(C64::new(c - a, 0.0)).unwrap())
}

#[test]
fn c_tensor_matches_euler_integral() {
    let (s, w, u) = (3.0, 2.5, 0.2);
    let c = c_tensor(C64::new(s, 0.0), C64::new(w, 0.0), u, Weight::HALF).unwrap();
    let front = gamma(C64::new(w + s, 0.0)).unwrap() * gamma(C64::new(s - w + 1.0, 0.0)).unwrap() / (4.0 * PI).powf(s);
    let p = front * euler_f_over_gamma(s - w + 1.0, s + w, s + 0.75, C64::new(0.5, u / 2.0));
    let m = front * euler_f_over_gamma(s - w + 1.0, s + w, s + 1.25, C64::new(0.5, -u / 2.0));
    assert!((c[0] - p).norm() <= 1e-10 * p.norm(), "{} vs {p}", c[0]);
    assert!((c[1] - m).norm() <= 1e-10 * m.norm(), "{} vs {m}", c[1]);
    assert!(c[0].norm() > 0.0 && c[0].norm().is_finite());
}

#[test]
fn c_tensor_reflection() {
    for (s, w) in [(C64::new(3.0, 0.5), C64::new(2.5, 0.1)), (C64::new(4.0, -2.0), C64::new(2.2, 0.0))] {
        for u in [0.0, 0.15, -0.3] {
            let c = c_tensor(s, w, u, Weight::HALF).unwrap();
            let r = c_tensor(s.conj(), w.conj(), -u, Weight::HALF).unwrap();
            assert!((c[0] - r[0].conj()).norm() <= 1e-12 * c[0].norm());
            assert!((c[1] - r[1].conj()).norm() <= 1e-12 * c[1].norm());
        }
    }
}

#[test]
fn c_tensor_at_zero_u_has_equal_arguments() {
    let s = C64::new(3.0, 0.0);
    let w = C64::new(2.5, 0.0);
    let c = c_tensor(s, w, 0.0, Weight::HALF).unwrap();
    let front = gamma(w + s).unwrap() * gamma(s - w + 1.0).unwrap() / (4.0 * PI).powf(3.0);
    let budget = PrecisionBudget::default();
    let half = C64::new(0.5, 0.0);
    let f1 = hyp2f1(s - w + 1.0, s + w, s + 0.75, half, budget).unwrap() / gamma(s + 0.75).unwrap();
    assert!((c[0] - front * f1).norm() <= 1e-14 * c[0].norm());
    assert!(c_tensor(s, w, 0.85, Weight::HALF).is_err());
}

fn zero_expansion() -> FourierExpansion {
    let mut e = level4().expansions[0][0].clone();
    e.a = C64::new(0.0, 0.0);
    e.b = C64::new(0.0, 0.0);
    e.coeffs.values_mut().for_each(|v| *v = C64::new(0.0, 0.0));
    e
}

#[test]
fn zero_data_gives_zero_lambda() {
    let z = zero_expansion();
    let chi = DirichletCharacter::principal(1);
    let data = LambdaData { expansion: &z, check: Some(&z) };
    let s = C64::new(3.0, 0.0);
    let opts = MellinOptions::default();
    for route in [Route::CTensor, Route::MellinQuadrature, Route::MellinDirect] {
        let v = lambda_completed(data, &chi, s, 0.1, route, &opts).unwrap();
        assert_eq!(v.value, C64::new(0.0, 0.0), "{route:?}");
    }
}

#[test]
fn two_routes_agree_on_finite_expansion() {
    let f = &level4().expansions[0][0];
    let data = LambdaData { expansion: f, check: None };
    let opts = MellinOptions::default();
    let s = C64::new(3.0, 0.0);
    for chi in [DirichletCharacter::principal(1), nontrivial(3)] {
        let a = lambda_completed(data, &chi, s, 0.1, Route::CTensor, &opts).unwrap();
        let b = lambda_completed(data, &chi, s, 0.1, Route::MellinDirect, &opts).unwrap();
        let r = (a.value - b.value).norm();
        assert!(r <= 1e-6, "D={}: {r}", chi.modulus());
    }
}

#[test]
fn lambda_is_linear_in_coefficients() {
    let f = &level4().expansions[0][0];
    let g = f.map_coefficients(|n| C64::new(1.0 / (1.0 + n.abs() as f64), 0.3));
    let mut sum = f.clone();
    for (n, v) in sum.coeffs.iter_mut() {
        *v += 2.0 * g.coeff(*n);
    }
    let chi = nontrivial(3);
    let s = C64::new(3.5, 0.7);
    let opts = MellinOptions::default();
    for route in [Route::CTensor, Route::MellinDirect] {
        let l = |e: &FourierExpansion| {
            lambda_completed(LambdaData { expansion: e, check: None }, &chi, s, -0.2, route, &opts)
                .unwrap()
                .value
        };
        let r = (l(&sum) - l(f) - 2.0 * l(&g)).norm();
        assert!(r <= 1e-9 * l(&sum).norm(), "{route:?}: {r}");
    }
}

#[test]
fn fricke_twist_identity() {
    let fx = level4();
    let l = Weight::HALF;
    for e in &fx.series {
        let f = |z: C64| e.value(z);
        let chk = check_function(f, l, 4);
        for d in [3u64, 5] {
            for chi in enumerate_characters(d) {
                let ft = twist_evaluator(f, &chi);
                let chi_check = dual_character(&chi).unwrap();
                let fct = twist_evaluator(&chk, &chi_check);
                let pre = fricke_prefactor(&chi, 4, l).unwrap();
                let wmat = RealMatrix::fricke(4 * (d * d) as i64);
                let kappa = 2.0 * d as f64;
                let mut worst: f64 = 0.0;
                for p in sample_points(17 + d, 10, (0.6, 1.4)) {
                    let z = C64::new(p.re * 2.0, p.im) / kappa;
                    let lhs = ft(wmat.act(z)) / j_factor_real(&wmat, z, l.value());
                    let rhs = pre * fct(z);
                    worst = worst.max((lhs - rhs).norm() / lhs.norm().max(1.0));
                }
                assert!(worst <= 1e-5, "cusp {} D={d}: {worst}", e.index());
            }
        }
    }
}

#[test]
fn riemann_split_does_not_depend_on_cut() {
    let fx = level4();
    let f = &fx.expansions[0][0];
    let chk = check_expansion(&fx.expansions[0][1]);
    let chi = DirichletCharacter::principal(1);
    let s = C64::new(1.3, 2.0);
    let base = MellinOptions::default();
    let a = RiemannSplit::new(f, &chk, &chi, 0.1, s.re, s.re, 2.0, &base).unwrap().eval(s).unwrap();
    let b = RiemannSplit::new(f, &chk, &chi, 0.1, s.re, s.re, 2.0, &MellinOptions { rho: 1.25, ..base })
        .unwrap()
        .eval(s)
        .unwrap();
    assert!((a.0 - b.0).norm() <= 1e-8, "{} vs {}", a.0, b.0);
}

#[test]
fn functional_equation() {
    let fx = level4();
    let f = &fx.expansions[0][0];
    let chk = check_expansion(&fx.expansions[0][1]);
    let chi = DirichletCharacter::principal(1);
    let chi_check = dual_character(&chi).unwrap();
    let opts = MellinOptions { rho: 1.25, ..Default::default() };
    for (s, u) in [(0.4, 0.0), (1.0, 0.1), (-0.7, -0.2), (2.2, 0.15), (3.0, -0.05)] {
        let s = C64::new(s, 0.3 * u * 10.0);
        let lhs = lambda_completed(LambdaData { expansion: f, check: Some(&chk) }, &chi, s, u, Route::MellinQuadrature, &opts).unwrap();
        let dual = lambda_completed(LambdaData { expansion: &chk, check: Some(f) }, &chi_check, -s, -u, Route::MellinQuadrature, &opts).unwrap();
        let h = h_factor(&chi, 4, Weight::HALF, u).unwrap();
        let rhs = h * (-s * (4.0 * (1.0 + u * u)).ln()).exp() * dual.value;
        let r = (lhs.value - rhs).norm();
        assert!(r <= 1e-5 * lhs.value.norm().max(1.0), "s={s} u={u}: {r}");
    }
}
