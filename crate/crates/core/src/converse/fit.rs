use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use super::{build_f, NiceFamilyDataset};
use crate::automorphy::{j_factor, MultiplierSystem};
use crate::eisenstein::{EisensteinConfig, EisensteinSeries, SpectralContext};
use crate::modgroup::{generators, invariance_points, ModularMatrix};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceRow {
    pub j: usize,
    pub generator: ModularMatrix,
    /// `max |f_j|γ − ν(γ) f_j|` over the sample points.
    pub residual: f64,
    /// Smallest height at which `f_j` was evaluated.
    pub min_height: f64,
}

/// `|f_j|γ − ν(γ)f_j|` for every family and every generator of height at
/// most `height`, at `points` points per generator.
pub fn generator_invariance(dataset: &NiceFamilyDataset, height: i64, points: usize) -> Result<Vec<InvarianceRow>> {
    dataset.require_nonempty()?;
    let mult = MultiplierSystem::new(dataset.level, dataset.weight.class())?;
    let l = dataset.weight.value();
    let gens = generators(dataset.level, height)?;
    let jobs: Vec<(usize, ModularMatrix)> = dataset
        .families
        .iter()
        .flat_map(|f| gens.iter().map(move |g| (f.j, *g)))
        .collect();
    jobs.par_iter()
        .map(|&(j, g)| {
            let nu = mult.eval(&g)?;
            let mut residual: f64 = 0.0;
            let mut min_height = f64::INFINITY;
            for z in invariance_points(&g, points) {
                let gz = g.act(z);
                min_height = min_height.min(z.im).min(gz.im);
                let lhs = build_f(dataset, j, gz, dataset.w)? / j_factor(&g, z, l);
                let rhs = nu * build_f(dataset, j, z, dataset.w)?;
                residual = residual.max((lhs - rhs).norm());
            }
            Ok(InvarianceRow { j, generator: g, residual, min_height })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    /// `A` with `f_j = Σ_i A_{ji} E_i`, serialized as rows of `[re, im]`.
    #[serde(serialize_with = "matrix_rows")]
    pub a: DMatrix<C64>,
    /// Largest residual over the fitting points, relative to `max_i |E_i(z)|`.
    pub fit_residual: f64,
    /// Same over the held-out points.
    pub holdout_residual: f64,
    /// Condition number of the weighted sample matrix.
    pub condition: f64,
}

fn matrix_rows<S: serde::Serializer>(m: &DMatrix<C64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<[f64; 2]>> = m.row_iter().map(|r| r.iter().map(|v| [v.re, v.im]).collect()).collect();
    rows.serialize(s)
}

pub type Evaluator<'a> = &'a (dyn Fn(C64) -> Result<C64> + Sync);

fn sample(evals: &[Evaluator<'_>], points: &[C64]) -> Result<DMatrix<C64>> {
    let cols = points
        .par_iter()
        .map(|&z| evals.iter().map(|e| e(z)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_fn(points.len(), evals.len(), |k, i| cols[k][i]))
}

fn row_scales(e: &DMatrix<C64>) -> Vec<f64> {
    e.row_iter()
        .map(|r| r.iter().fold(0.0f64, |m, v| m.max(v.norm())).max(f64::MIN_POSITIVE))
        .collect()
}

fn max_residual(f: &DMatrix<C64>, e: &DMatrix<C64>, a: &DMatrix<C64>) -> f64 {
    let scales = row_scales(e);
    let pred = e * a.transpose();
    let mut worst: f64 = 0.0;
    for k in 0..f.nrows() {
        for j in 0..f.ncols() {
            worst = worst.max((f[(k, j)] - pred[(k, j)]).norm() / scales[k]);
        }
    }
    worst
}

/// Least-squares `A(w)` with `f = A E` from `points`, scored on `holdout`.
///
/// Each sample row is scaled by `max_i |E_i(z)|`. Fails when there are fewer
/// than `2m` points or the scaled sample matrix has condition number above
/// `1e10`.
pub fn fit_a(f: &[Evaluator<'_>], e: &[Evaluator<'_>], points: &[C64], holdout: &[C64]) -> Result<FitResult> {
    let m = e.len();
    if m == 0 || f.is_empty() {
        return Err(Error::Invalid("fit_a needs at least one f and one E".into()));
    }
    if points.len() < 2 * m {
        return Err(Error::Invalid(format!("fit_a needs at least {} points, got {}", 2 * m, points.len())));
    }
    let fs = sample(f, points)?;
    let es = sample(e, points)?;
    let scales = row_scales(&es);
    let mut ew = es.clone();
    let mut fw = fs.clone();
    for k in 0..points.len() {
        ew.row_mut(k).scale_mut(1.0 / scales[k]);
        fw.row_mut(k).scale_mut(1.0 / scales[k]);
    }
    let svd = ew.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition < 1e10) {
        return Err(Error::IllConditioned(format!(
            "sample matrix for fit_a has condition number {condition:.3e}"
        )));
    }
    let mut a = DMatrix::zeros(f.len(), m);
    for j in 0..f.len() {
        let rhs: DVector<C64> = fw.column(j).into_owned();
        let sol = svd
            .solve(&rhs, 0.0)
            .map_err(|e| Error::IllConditioned(e.to_string()))?;
        for i in 0..m {
            a[(j, i)] = sol[i];
        }
    }
    let fit_residual = max_residual(&fs, &es, &a);
    let holdout_residual = if holdout.is_empty() {
        0.0
    } else {
        max_residual(&sample(f, holdout)?, &sample(e, holdout)?, &a)
    };
    Ok(FitResult { a, fit_residual, holdout_residual, condition })
}

/// `max |Φ(1−w) A(w) Φ(w) − A(1−w)|`.
pub fn a_phi_residual(phi_1mw: &DMatrix<C64>, a_w: &DMatrix<C64>, phi_w: &DMatrix<C64>, a_1mw: &DMatrix<C64>) -> f64 {
    let d = phi_1mw * a_w * phi_w - a_1mw;
    d.iter().fold(0.0, |m, v| m.max(v.norm()))
}

/// Everything the reconstruction pipeline produces for a dataset.
#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionResult {
    #[serde(skip)]
    pub dataset: NiceFamilyDataset,
    pub invariance: Vec<InvarianceRow>,
    pub fit: FitResult,
}

impl ReconstructionResult {
    /// `f_j(z)` from the dataset.
    pub fn f(&self, j: usize, z: C64) -> Result<C64> {
        build_f(&self.dataset, j, z, self.dataset.w)
    }

    pub fn max_invariance(&self) -> f64 {
        self.invariance.iter().fold(0.0, |m, r| m.max(r.residual))
    }
}

/// Builds `f_j`, checks generator invariance, and fits `f = A E` against
/// freshly summed Eisenstein series for the dataset's level, weight and `w`.
pub fn reconstruct(
    dataset: &NiceFamilyDataset,
    config: &EisensteinConfig,
    invariance_height: i64,
    points: usize,
) -> Result<ReconstructionResult> {
    dataset.require_nonempty()?;
    let ctx = SpectralContext::new(dataset.level, dataset.weight, dataset.w)?;
    let m = ctx.singular_cusps()?.len();
    let series = (1..=m)
        .map(|i| EisensteinSeries::new(&ctx, i, config))
        .collect::<Result<Vec<_>>>()?;
    let invariance = generator_invariance(dataset, invariance_height, points)?;
    let e_fns: Vec<Box<dyn Fn(C64) -> Result<C64> + Sync + '_>> = series
        .iter()
        .map(|s| Box::new(move |z: C64| Ok(s.value(z))) as Box<dyn Fn(C64) -> Result<C64> + Sync>)
        .collect();
    let f_fns: Vec<Box<dyn Fn(C64) -> Result<C64> + Sync + '_>> = dataset
        .families
        .iter()
        .map(|fam| {
            let j = fam.j;
            Box::new(move |z: C64| build_f(dataset, j, z, dataset.w)) as Box<dyn Fn(C64) -> Result<C64> + Sync>
        })
        .collect();
    let e_refs: Vec<Evaluator<'_>> = e_fns.iter().map(|b| b.as_ref()).collect();
    let f_refs: Vec<Evaluator<'_>> = f_fns.iter().map(|b| b.as_ref()).collect();
    let n = points.max(2 * m);
    let all: Vec<C64> = (1..=2 * n)
        .map(|i| {
            let a = (i as f64 * 0.618_033_988_749_895).fract();
            let b = (i as f64 * 0.414_213_562_373_095).fract();
            C64::new(a - 0.5, 0.5 + b)
        })
        .collect();
    let fit = fit_a(&f_refs, &e_refs, &all[..n], &all[n..])?;
    Ok(ReconstructionResult {
        dataset: dataset.clone(),
        invariance,
        fit,
    })
}
