//! Check suites behind the `check-*` commands and the dataset commands.

use anyhow::{anyhow, Context};
use metaplex::arith::{dual_character, enumerate_characters, gauss_sum, gcd, DirichletCharacter};
use metaplex::automorphy::{j_factor_real, r_closed, r_direct, theta_multiplier, theta_series_converged};
use metaplex::converse::{
    fit_a, mellin_invert, residue_term, validate_nice_family, Evaluator, NiceFamilyDataset,
};
use metaplex::eisenstein::{fourier_coefficients, EisensteinSeries, FourierExpansion, SpectralContext};
use metaplex::lfunc::{
    check_function, fricke_prefactor, lambda_completed, twist_evaluator, LambdaData, MellinOptions, RiemannSplit,
    Route,
};
use metaplex::modgroup::{generators, invariance_points, random_gamma0, random_sl2};
use metaplex::report::{Check, VerificationReport};
use metaplex::specfun::half_power;
use metaplex::{RealMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::config::RunConfig;

const ENTRY_BOUND: i64 = 50;

fn rng(cfg: &RunConfig, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed);
    r.set_stream(stream);
    r
}

/// Points `x + iy`, `x ∈ [−1/2, 1/2)`, `y ∈ [y0, y1)`.
fn strip_points(rng: &mut ChaCha8Rng, k: usize, y0: f64, y1: f64) -> Vec<C64> {
    (0..k).map(|_| C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(y0..y1))).collect()
}

fn worst(v: impl IntoIterator<Item = f64>) -> f64 {
    // NaN propagates so that a broken evaluation cannot pass.
    v.into_iter().fold(0.0, |m: f64, r| if r.is_nan() || m.is_nan() { f64::NAN } else { m.max(r) })
}

/// `r(M,N)` closed form against its definition at `z = i`.
pub fn cocycle(cfg: &RunConfig, pairs: usize) -> anyhow::Result<VerificationReport> {
    let mut rng = rng(cfg, 1);
    let mats: Vec<_> = (0..pairs)
        .map(|_| (random_sl2(&mut rng, ENTRY_BOUND), random_sl2(&mut rng, ENTRY_BOUND)))
        .collect();
    let tol = cfg.tolerances.cocycle;
    let z = C64::new(0.0, 1.0);
    let mut report = VerificationReport::new();
    for l in [0.5, 1.5] {
        let res: Vec<f64> = mats
            .par_iter()
            .map(|(m, n)| (r_closed(m, n, l) - r_direct(m, n, z, l)).norm())
            .collect();
        let mismatches = res.iter().filter(|r| !(**r <= tol)).count();
        report.push(Check::new(
            "cocycle closed form",
            "closed form of the consistency factor r(M,N) of the automorphy factor",
            json!({"l": l, "pairs": pairs, "entry_bound": ENTRY_BOUND, "seed": cfg.seed, "z": [0.0, 1.0], "mismatches": mismatches}),
            worst(res),
            tol,
        ));
    }
    Ok(report)
}

/// Theta multiplier against the theta series, then the multiplier acting on
/// the Eisenstein series (automorphy and the Laplace eigenvalue).
pub fn theta(cfg: &RunConfig, samples: usize) -> anyhow::Result<VerificationReport> {
    let mut report = VerificationReport::new();
    let mut rng1 = rng(cfg, 2);
    let level = cfg.level;
    let mats: Vec<_> = (0..samples).map(|_| random_gamma0(&mut rng1, 4, 60)).collect();
    let z = C64::new(0.0, 1.0);
    let res = mats
        .par_iter()
        .map(|g| {
            let tz = theta_series_converged(z, 50, 1e-15)?.value;
            let tgz = theta_series_converged(g.act(z), 50, 1e-15)?.value;
            let ratio = tgz / (half_power(g.c as f64 * z + g.d as f64, 1.0)? * tz);
            Ok((ratio - theta_multiplier(g)?).norm())
        })
        .collect::<metaplex::Result<Vec<f64>>>()?;
    report.push(Check::new(
        "theta multiplier",
        "theta(gz) / ((cz+d)^(1/2) theta(z)) equals the theta multiplier on Gamma0(4)",
        json!({"samples": samples, "entry_bound": 60, "seed": cfg.seed, "z": [0.0, 1.0], "n_max": 50}),
        worst(res),
        cfg.tolerances.theta,
    ));

    let ctx = cfg.context()?;
    let econf = cfg.eisenstein();
    let m = ctx.singular_cusps()?.len();
    let gens = generators(level, 5)?;
    let mut rng2 = rng(cfg, 3);
    let lap_points = strip_points(&mut rng2, 10, 0.6, 1.4);
    for i in 1..=m {
        let e = EisensteinSeries::new(&ctx, i, &econf)?;
        let res = gens
            .par_iter()
            .map(|g| {
                let pts = invariance_points(g, 10);
                pts.iter().map(|z| e.automorphy_residual(g, *z)).collect::<metaplex::Result<Vec<f64>>>()
            })
            .collect::<metaplex::Result<Vec<_>>>()?;
        report.push(Check::new(
            "eisenstein automorphy",
            "E_i(.,w)|g = nu(g) E_i(.,w) for the generators of Gamma0(4N)",
            json!({"i": i, "level": level, "w": cfg.w, "c_max": cfg.c_max, "generators": gens.len(), "points_per_generator": 10}),
            worst(res.into_iter().flatten()),
            cfg.tolerances.automorphy,
        ));
        let res: Vec<f64> = lap_points.par_iter().map(|z| e.laplacian_residual(*z, 1e-3)).collect();
        report.push(Check::new(
            "laplacian eigenvalue",
            "E_i(.,w) is an eigenfunction of the weight-l Laplacian with eigenvalue w(1-w)",
            json!({"i": i, "level": level, "w": cfg.w, "points": lap_points.len(), "step": 1e-3}),
            worst(res),
            cfg.tolerances.laplacian,
        ));
    }
    Ok(report)
}

/// Gauss sum moduli and the Fricke relation of the twisted Eisenstein series.
pub fn twist(cfg: &RunConfig) -> anyhow::Result<VerificationReport> {
    let mut report = VerificationReport::new();
    for d in [3u64, 5, 7, 11] {
        let mut res = Vec::new();
        for chi in enumerate_characters(d).into_iter().filter(|c| c.is_primitive()) {
            for n in -(d as i64)..=2 * d as i64 {
                if gcd(n, d as i64) == 1 {
                    res.push((gauss_sum(&chi, n).norm() - (d as f64).sqrt()).abs());
                }
            }
        }
        report.push(Check::new(
            "gauss sum modulus",
            "|tau_n(chi)| = sqrt(D) for primitive chi and n coprime to D",
            json!({"D": d, "terms": res.len()}),
            worst(res),
            cfg.tolerances.gauss,
        ));
    }

    let ctx = cfg.context()?;
    let weight = ctx.weight;
    let econf = cfg.eisenstein();
    let level = cfg.level;
    let m = ctx.singular_cusps()?.len();
    let mut rng = rng(cfg, 4);
    for i in 1..=m {
        let e = EisensteinSeries::new(&ctx, i, &econf)?;
        let f = |z: C64| e.value(z);
        let chk = check_function(f, weight, level);
        for d in [3u64, 5] {
            if gcd(d as i64, level) != 1 {
                continue;
            }
            let pts = strip_points(&mut rng, 10, 0.6, 1.4);
            let kappa = (level as f64).sqrt() * d as f64;
            let wmat = RealMatrix::fricke(level * (d * d) as i64);
            let mut res = Vec::new();
            for chi in enumerate_characters(d) {
                let ft = twist_evaluator(f, &chi);
                let chi_check = dual_character(&chi)?;
                let fct = twist_evaluator(&chk, &chi_check);
                let pre = fricke_prefactor(&chi, level, weight)?;
                let r: Vec<f64> = pts
                    .par_iter()
                    .map(|p| {
                        let z = C64::new(2.0 * p.re, p.im) / kappa;
                        let lhs = ft(wmat.act(z)) / j_factor_real(&wmat, z, weight.value());
                        let rhs = pre * fct(z);
                        (lhs - rhs).norm() / lhs.norm().max(1.0)
                    })
                    .collect();
                res.extend(r);
            }
            report.push(Check::new(
                "fricke twist",
                "f(.,chi)|W_{4ND^2} = conj(chi(-4N)) (4N/D) eps_D e^{-pi i l/2} fcheck(.,chi-check)",
                json!({"i": i, "D": d, "level": level, "points": pts.len(), "characters": enumerate_characters(d).len()}),
                worst(res),
                cfg.tolerances.fricke,
            ));
        }
    }
    Ok(report)
}

/// Expansions of every `E_i` at ∞ and at the cusp 0.
pub fn expansions(ctx: &SpectralContext, cfg: &RunConfig) -> anyhow::Result<(Vec<FourierExpansion>, Vec<FourierExpansion>)> {
    let econf = cfg.eisenstein();
    let cusps = ctx.singular_cusps()?;
    let zero = cusps
        .iter()
        .position(|c| c.is_zero())
        .ok_or_else(|| anyhow!("cusp 0 is not singular at level {}", ctx.level))?
        + 1;
    let rows = (1..=cusps.len())
        .into_par_iter()
        .map(|i| {
            let e = EisensteinSeries::new(ctx, i, &econf)?;
            Ok((fourier_coefficients(&e, 1, &econf)?, fourier_coefficients(&e, zero, &econf)?))
        })
        .collect::<metaplex::Result<Vec<_>>>()?;
    Ok(rows.into_iter().unzip())
}

/// The completed L-function: the two routes, the functional equation
/// (through the validator), and the contour shift.
pub fn lambda(cfg: &RunConfig) -> anyhow::Result<VerificationReport> {
    let ctx = cfg.context()?;
    let (direct, zero) = expansions(&ctx, cfg)?;
    let dataset = NiceFamilyDataset::from_expansions(&direct, &zero, ctx.w.re)?;
    let mut report = VerificationReport::new();
    let opts = MellinOptions::default();
    let s = C64::new(3.0, 0.0);
    let u = 0.1;
    for d in [1u64, 3] {
        if gcd(d as i64, cfg.level) != 1 {
            continue;
        }
        let chi = if d == 1 {
            DirichletCharacter::principal(1)
        } else {
            enumerate_characters(d).into_iter().find(|c| !c.is_principal()).context("no nontrivial character")?
        };
        let data = LambdaData { expansion: &direct[0], check: None };
        let a = lambda_completed(data, &chi, s, u, Route::CTensor, &opts)?;
        let b = lambda_completed(data, &chi, s, u, Route::MellinDirect, &opts)?;
        report.push(Check::new(
            "two-route completed L-value",
            "completed L-function as Gamma-hypergeometric tensor times L-series equals its Mellin integral",
            json!({"i": 1, "D": d, "s": [s.re, s.im], "u": u, "w": cfg.w, "n_max": a.n_max,
                   "c_tensor": [a.value.re, a.value.im], "mellin": [b.value.re, b.value.im]}),
            (a.value - b.value).norm(),
            cfg.tolerances.two_route,
        ));
    }
    let mut options = cfg.validation.clone();
    options.moduli = vec![1];
    let v = validate_nice_family(&dataset, &options, None)?;
    for c in v.checks.into_iter().filter(|c| c.name == "functional equation") {
        report.push(c);
    }
    report.merge(contour_shift(&dataset, 1, cfg.tolerances.contour)?);
    Ok(report)
}

/// `mellin_invert(σ₀) − mellin_invert(−σ₀)` against the residue term at
/// `y = 1`, `u = 0.1`, `χ` mod 1.
pub fn contour_shift(dataset: &NiceFamilyDataset, j: usize, tol: f64) -> anyhow::Result<VerificationReport> {
    let chi = DirichletCharacter::principal(1);
    let (u, y, sigma, t_max, nodes) = (0.1, 1.0, 4.0, 40.0, 2000);
    let f = dataset.expansion(j)?;
    let chk = dataset.dual_expansion(j)?;
    let opts = MellinOptions { rho: 1.0, ..Default::default() };
    let split = RiemannSplit::new(&f, &chk, &chi, u, -sigma, sigma, t_max, &opts)?;
    let lam = |s: C64| split.eval(s).map(|v| v.0);
    let right = mellin_invert(lam, y, sigma, t_max, nodes)?;
    let left = mellin_invert(lam, y, -sigma, t_max, nodes)?;
    let res = residue_term(dataset, j, dataset.w, u, y, &chi)?;
    let diff = right.value - left.value;
    let mut report = VerificationReport::new();
    report.push(Check::new(
        "contour shift",
        "difference of the inverse Mellin integrals on Re s = +-sigma equals the sum of residues",
        json!({"j": j, "y": y, "u": u, "sigma": sigma, "t_max": t_max, "nodes": nodes,
               "shift": [diff.re, diff.im], "residues": [res.re, res.im]}),
        (diff - res).norm() / res.norm().max(1.0),
        tol,
    ));
    Ok(report)
}

/// Least-squares `A` with `f_j = Σ_i A_{ji} E_i` against freshly summed
/// Eisenstein series.
pub fn fit(dataset: &NiceFamilyDataset, cfg: &RunConfig, points: usize) -> anyhow::Result<VerificationReport> {
    let ctx = SpectralContext::new(dataset.level, dataset.weight, dataset.w)?;
    let econf = cfg.eisenstein();
    let m = ctx.singular_cusps()?.len();
    let series = (1..=m).map(|i| EisensteinSeries::new(&ctx, i, &econf)).collect::<metaplex::Result<Vec<_>>>()?;
    let e_fns: Vec<Box<dyn Fn(C64) -> metaplex::Result<C64> + Sync + '_>> = series
        .iter()
        .map(|s| Box::new(move |z: C64| Ok(s.value(z))) as Box<dyn Fn(C64) -> metaplex::Result<C64> + Sync>)
        .collect();
    let f_fns: Vec<Box<dyn Fn(C64) -> metaplex::Result<C64> + Sync + '_>> = dataset
        .families
        .iter()
        .map(|fam| {
            let j = fam.j;
            Box::new(move |z: C64| metaplex::converse::build_f(dataset, j, z, dataset.w))
                as Box<dyn Fn(C64) -> metaplex::Result<C64> + Sync>
        })
        .collect();
    let e: Vec<Evaluator<'_>> = e_fns.iter().map(|b| b.as_ref()).collect();
    let f: Vec<Evaluator<'_>> = f_fns.iter().map(|b| b.as_ref()).collect();
    let mut rng = rng(cfg, 5);
    let pts = strip_points(&mut rng, points.max(2 * m), 0.5, 1.5);
    let hold = strip_points(&mut rng, 10, 0.5, 1.5);
    let fit = fit_a(&f, &e, &pts, &hold)?;
    let rows: Vec<Vec<[f64; 2]>> = fit.a.row_iter().map(|r| r.iter().map(|v| [v.re, v.im]).collect()).collect();
    let mut report = VerificationReport::new();
    report.push(Check::new(
        "fit A",
        "f(z,w) = A(w) E(z,w): least-squares fit scored on held-out points",
        json!({"points": pts.len(), "holdout": hold.len(), "condition": fit.condition,
               "fit_residual": fit.fit_residual, "A": rows}),
        fit.holdout_residual,
        cfg.tolerances.fit,
    ));
    Ok(report)
}

/// The whole pipeline: the validator (including generator invariance) and
/// the fit.
pub fn reconstruct(dataset: &NiceFamilyDataset, cfg: &RunConfig, points: usize) -> anyhow::Result<VerificationReport> {
    let mut report = validate(dataset, cfg)?;
    report.merge(fit(dataset, cfg, points)?);
    Ok(report)
}

pub fn validate(dataset: &NiceFamilyDataset, cfg: &RunConfig) -> anyhow::Result<VerificationReport> {
    Ok(validate_nice_family(dataset, &cfg.validation, None)?)
}
