use super::*;
use crate::arith::enumerate_characters;
use crate::fixtures::level4;
use crate::lfunc::{lambda_completed, twist, LambdaData, MellinOptions, RiemannSplit, Route};
use nalgebra::DMatrix;

fn dataset() -> NiceFamilyDataset {
    let fx = level4();
    let direct = [fx.expansions[0][0].clone(), fx.expansions[1][0].clone()];
    let zero = [fx.expansions[0][1].clone(), fx.expansions[1][1].clone()];
    NiceFamilyDataset::from_expansions(&direct, &zero, 2.5).unwrap()
}

fn grid(k: usize, y0: f64, y1: f64) -> Vec<C64> {
    (1..=k)
        .map(|i| {
            let a = (i as f64 * 0.754_877_666_246_693).fract();
            let b = (i as f64 * 0.569_840_290_998_053).fract();
            C64::new(a - 0.5, y0 + (y1 - y0) * b)
        })
        .collect()
}

#[test]
fn json_round_trip() {
    let d = dataset();
    let back = NiceFamilyDataset::from_json(&d.to_json().unwrap()).unwrap();
    assert_eq!(back, d);
    let v: serde_json::Value = serde_json::from_str(&d.to_json().unwrap()).unwrap();
    assert_eq!(v["weight"], "1/2");
    assert_eq!(v["families"][0]["j"], 1);
    assert!(v["families"][0]["coeffs_at_w"].is_array());
    assert!(v["growth"]["C"].is_number());
}

#[test]
fn json_schema_errors() {
    let base = serde_json::json!({
        "level": 4, "weight": "1/2", "w": [2.5, 0.0],
        "families": [{"j": 1, "const": {"a": [0,0], "b": [1,0], "adual": [0,0], "bdual": [0,0]},
                      "coeffs": [{"n": 1, "m": 1, "re": 1.0, "im": 0.0}]}],
        "growth": {"C": 1.0, "alpha": 1.0, "beta": 0.0}
    });
    assert!(NiceFamilyDataset::from_json(&base.to_string()).is_ok());
    let with = |path: &str, val: serde_json::Value| {
        let mut v = base.clone();
        v["families"][0][path] = val;
        NiceFamilyDataset::from_json(&v.to_string())
    };
    assert!(with("coeffs", serde_json::json!([{"n": 0, "m": 1, "re": 1.0, "im": 0.0}])).is_err());
    assert!(with("coeffs", serde_json::json!([{"n": 1, "m": 0, "re": 1.0, "im": 0.0}])).is_err());
    assert!(with("coeffs", serde_json::json!([{"n": 1, "m": 1, "re": 1.0, "im": 0.0}, {"n": 1, "m": 1, "re": 2.0, "im": 0.0}])).is_err());
    assert!(with("coeffs_at_w", serde_json::json!([{"n": 1, "re": 1.0, "im": 0.0}])).is_err());
    let mut v = base.clone();
    v["weight"] = "1/3".into();
    assert!(NiceFamilyDataset::from_json(&v.to_string()).is_err());
    assert!(NiceFamilyDataset::from_json("{").is_err());
}

#[test]
fn double_array_sums_over_m() {
    let w = C64::new(2.5, 0.3);
    let mut m = BTreeMap::new();
    m.insert((1, 1), C64::new(1.0, 0.0));
    m.insert((1, 2), C64::new(0.5, -0.25));
    m.insert((1, 3), C64::new(-2.0, 0.0));
    m.insert((-2, 1), C64::new(0.0, 1.0));
    let data = CoefficientData::Double(m);
    let got = data.at(w, w).unwrap();
    let p = |k: f64| (-w * k.ln()).exp();
    let want = C64::new(1.0, 0.0) + C64::new(0.5, -0.25) * p(2.0) - 2.0 * p(3.0);
    assert!((got[&1] - want).norm() <= 1e-12);
    assert!((got[&-2] - C64::new(0.0, 1.0)).norm() <= 1e-12);
    // values at w are only available at the dataset's w
    let single = CoefficientData::AtW(got);
    assert!(single.at(w + 0.1, w).is_err());
}

#[test]
fn build_f_zero_coefficients() {
    let mut d = dataset();
    for f in d.families.iter_mut() {
        f.a = C64::new(0.0, 0.0);
        f.b = C64::new(0.0, 0.0);
        f.coeffs = CoefficientData::AtW(BTreeMap::new());
    }
    assert_eq!(build_f(&d, 1, C64::new(0.1, 0.7), d.w).unwrap(), C64::new(0.0, 0.0));
}

#[test]
fn build_f_matches_eisenstein_series() {
    let d = dataset();
    let fx = level4();
    for j in 1..=2 {
        for z in grid(10, 0.8, 1.5) {
            let f = build_f(&d, j, z, d.w).unwrap();
            let e = fx.series[j - 1].value(z);
            assert!((f - e).norm() <= 1e-5 * e.norm(), "j={j} z={z}: {f} vs {e}");
        }
    }
}

#[test]
fn build_f_is_periodic_and_guards_inputs() {
    let d = dataset();
    for z in grid(6, 0.5, 1.0) {
        let a = build_f(&d, 1, z, d.w).unwrap();
        let b = build_f(&d, 1, z + 1.0, d.w).unwrap();
        assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
    }
    assert!(build_f(&d, 1, C64::new(0.0, -1.0), d.w).is_err());
    assert!(build_f(&d, 1, C64::new(0.0, 1.0), d.w + 0.5).is_err());
    assert!(build_f(&d, 7, C64::new(0.0, 1.0), d.w).is_err());
}

#[test]
fn residue_term_is_zero_without_constants_and_linear() {
    let mut d = dataset();
    let chi = enumerate_characters(3).pop().unwrap();
    let r = residue_term(&d, 1, d.w, 0.2, 0.9, &chi).unwrap();
    let r2 = {
        let mut e = d.clone();
        for f in e.families.iter_mut() {
            f.a *= 2.0;
            f.b *= 2.0;
            f.adual *= 2.0;
            f.bdual *= 2.0;
        }
        residue_term(&e, 1, e.w, 0.2, 0.9, &chi).unwrap()
    };
    assert!((r2 - 2.0 * r).norm() <= 1e-12 * r.norm().max(1.0));
    for f in d.families.iter_mut() {
        f.a = C64::new(0.0, 0.0);
        f.b = C64::new(0.0, 0.0);
        f.adual = C64::new(0.0, 0.0);
        f.bdual = C64::new(0.0, 0.0);
    }
    assert_eq!(residue_term(&d, 1, d.w, 0.2, 0.9, &chi).unwrap(), C64::new(0.0, 0.0));
}

#[test]
fn mellin_invert_zero_and_nondecaying() {
    let z = mellin_invert(|_| Ok(C64::new(0.0, 0.0)), 1.0, 2.0, 10.0, 200).unwrap();
    assert_eq!(z.value, C64::new(0.0, 0.0));
    assert!(mellin_invert(|_| Ok(C64::new(1.0, 0.0)), 1.0, 2.0, 10.0, 200).is_err());
    assert!(mellin_invert(|_| Ok(C64::new(1.0, 0.0)), -1.0, 2.0, 10.0, 200).is_err());
}

#[test]
fn mellin_invert_gaussian() {
    // Λ(s) = exp(s²) is the Mellin transform of exp(−(log y)²/4)/(2√π).
    let y: f64 = 1.7;
    let want = (-(y.ln()).powi(2) / 4.0).exp() / (2.0 * std::f64::consts::PI.sqrt());
    let got = mellin_invert(|s| Ok((s * s).exp()), y, 0.5, 12.0, 1000).unwrap();
    assert!((got.value - want).norm() <= 1e-12, "{} vs {want}", got.value);
}

#[test]
fn mellin_invert_recovers_twisted_function() {
    let d = dataset();
    let chi = DirichletCharacter::principal(1);
    let u = 0.1;
    let y = 1.0;
    let f = d.expansion(1).unwrap();
    let lam = |s: C64| -> Result<C64> {
        Ok(lambda_completed(LambdaData { expansion: &f, check: None }, &chi, s, u, Route::CTensor, &MellinOptions::default())?.value)
    };
    let got = mellin_invert(lam, y, 4.0, 40.0, 2000).unwrap();
    let want = twist(&f, &chi).unwrap().expansion().eval_nonconstant(C64::new(u, 1.0) * y).unwrap();
    assert!((got.value - want).norm() <= 1e-4 * want.norm(), "{} vs {want}", got.value);
    let wider = mellin_invert(lam, y, 4.0, 80.0, 4000).unwrap();
    assert!((wider.value - got.value).norm() <= 1e-4 * want.norm());
}

#[test]
fn contour_shift_picks_up_residues() {
    let d = dataset();
    let chi = DirichletCharacter::principal(1);
    let (u, y, sigma) = (0.1, 1.0, 4.0);
    let f = d.expansion(1).unwrap();
    let chk = d.dual_expansion(1).unwrap();
    let opts = MellinOptions { rho: 1.0, ..Default::default() };
    let split = RiemannSplit::new(&f, &chk, &chi, u, -sigma, sigma, 40.0, &opts).unwrap();
    let lam = |s: C64| split.eval(s).map(|v| v.0);
    let right = mellin_invert(lam, y, sigma, 40.0, 2000).unwrap();
    let left = mellin_invert(lam, y, -sigma, 40.0, 2000).unwrap();
    let res = residue_term(&d, 1, d.w, u, y, &chi).unwrap();
    let diff = right.value - left.value;
    assert!((diff - res).norm() <= 1e-4 * res.norm().max(1.0), "{diff} vs {res}");
}

#[test]
fn validator_passes_eisenstein_data() {
    let d = dataset();
    let report = validate_nice_family(&d, &ValidationOptions::default(), None).unwrap();
    for c in &report.checks {
        assert!(c.pass, "{} failed: residual {}", c.name, c.residual);
    }
    assert!(!report.assumptions.is_empty());
}

#[test]
fn validator_rejects_perturbed_data() {
    let mut d = dataset();
    let f = d.families.iter_mut().find(|f| f.j == 1).unwrap();
    if let CoefficientData::AtW(c) = &mut f.coeffs {
        *c.get_mut(&1).unwrap() *= 1.1;
    }
    let report = validate_nice_family(&d, &ValidationOptions::default(), None).unwrap();
    assert!(!report.all_pass());
    assert!(!report.checks.iter().filter(|c| c.name == "functional equation").all(|c| c.pass));
}

#[test]
fn validator_passes_dual_data() {
    let d = dataset().dual().unwrap();
    let report = validate_nice_family(&d, &ValidationOptions::default(), None).unwrap();
    let fe: Vec<_> = report.checks.iter().filter(|c| c.name == "functional equation").collect();
    assert!(!fe.is_empty());
    assert!(fe.iter().all(|c| c.pass), "{fe:?}");
}

#[test]
fn validator_needs_data() {
    let mut d = dataset();
    d.families[0].dual = None;
    assert!(validate_nice_family(&d, &ValidationOptions::default(), None).is_err());
    d.families.clear();
    assert!(validate_nice_family(&d, &ValidationOptions::default(), None).is_err());
    let opts = ValidationOptions { moduli: vec![2], ..Default::default() };
    assert!(validate_nice_family(&dataset(), &opts, None).is_err());
}

#[test]
fn scattering_condition_on_mixed_data() {
    let d = dataset();
    let p = DMatrix::from_row_slice(2, 2, &[C64::new(0.5, 0.1), C64::new(2.0, 0.0), C64::new(0.0, -1.0), C64::new(1.5, 0.0)]);
    let mut other = d.clone();
    let cs: Vec<BTreeMap<i64, C64>> = d.families.iter().map(|f| f.coeffs.at(d.w, d.w).unwrap()).collect();
    for (r, f) in other.families.iter_mut().enumerate() {
        let mixed = cs[0].keys().map(|n| (*n, p[(r, 0)] * cs[0][n] + p[(r, 1)] * cs[1].get(n).copied().unwrap_or_default())).collect();
        f.coeffs = CoefficientData::AtW(mixed);
    }
    let opts = ValidationOptions { samples: vec![[1.0, 0.2, 0.0]], ..Default::default() };
    let good = ConditionD { phi_one_minus_w: p.clone(), other: other.clone() };
    let report = validate_nice_family(&d, &opts, Some(&good)).unwrap();
    assert!(report.find("scattering relation").unwrap().pass);
    let bad = ConditionD { phi_one_minus_w: p * C64::new(1.01, 0.0), other };
    let report = validate_nice_family(&d, &opts, Some(&bad)).unwrap();
    assert!(!report.find("scattering relation").unwrap().pass);
}

#[test]
fn generator_invariance_of_eisenstein_data() {
    let d = dataset();
    let rows = generator_invariance(&d, 1, 10).unwrap();
    assert!(!rows.is_empty());
    for r in rows {
        assert!(r.residual <= 1e-4, "{r:?}");
    }
}

fn fixed(v: C64) -> impl Fn(C64) -> Result<C64> + Sync {
    move |z: C64| Ok(v * (C64::new(0.0, 2.0 * std::f64::consts::PI) * z).exp())
}

#[test]
fn fit_a_recovers_known_matrices() {
    let fx = level4();
    let e1 = |z: C64| Ok(fx.series[0].value(z));
    let e2 = |z: C64| Ok(fx.series[1].value(z));
    let e: [Evaluator<'_>; 2] = [&e1, &e2];
    let pts = grid(12, 0.5, 1.5);
    let hold = grid(20, 0.6, 1.4)[12..].to_vec();
    let id = fit_a(&e, &e, &pts, &hold).unwrap();
    let eye = DMatrix::<C64>::identity(2, 2);
    assert!(id.a.iter().zip(eye.iter()).all(|(a, b)| (a - b).norm() <= 1e-8));
    let f1 = |z: C64| Ok(2.0 * fx.series[0].value(z));
    let f: [Evaluator<'_>; 2] = [&f1, &e2];
    let diag = fit_a(&f, &e, &pts, &hold).unwrap();
    assert!((diag.a[(0, 0)] - 2.0).norm() <= 1e-8 && diag.a[(0, 1)].norm() <= 1e-8);
    assert!(diag.holdout_residual <= 1e-4);
}

#[test]
fn fit_a_rejects_rank_deficiency_and_few_points() {
    let g = fixed(C64::new(1.0, 0.0));
    let h = fixed(C64::new(-3.0, 0.0));
    let e: [Evaluator<'_>; 2] = [&g, &h];
    let pts = grid(8, 0.5, 1.0);
    assert!(matches!(fit_a(&e, &e, &pts, &[]), Err(Error::IllConditioned(_))));
    assert!(fit_a(&e, &e, &pts[..3], &[]).is_err());
}

#[test]
fn a_phi_residual_vanishes_for_consistent_data() {
    let phi = DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 1.0), C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(0.5, 0.5)]);
    let a = DMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 0.2), C64::new(-1.0, 0.0), C64::new(3.0, 0.0)]);
    let id = DMatrix::<C64>::identity(2, 2);
    let a1 = &phi * &a;
    assert!(a_phi_residual(&phi, &a, &id, &a1) <= 1e-15);
    assert!(a_phi_residual(&phi, &a, &id, &a) > 0.1);
}
