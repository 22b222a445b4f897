//! Reconstruction of modular functions from coefficient data.
//!
//! A [`NiceFamilyDataset`] holds, for each singular cusp index `j`, the
//! coefficients `aₙʲ(w)` of a candidate `f_j`, its constant terms, and the
//! same data for the dual family `f̌_j`. Throughout this module `b` is the
//! coefficient of `y^w` and `a` that of `y^{1−w}`.

mod fit;
mod validate;
#[cfg(test)]
mod tests;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{dual_character, gauss_sum, DirichletCharacter};
use crate::automorphy::Weight;
use crate::eisenstein::{parse_weight_label, weight_label, ExpansionMeta, FourierExpansion};
use crate::lfunc::{check_expansion, h_factor};
use crate::specfun::quad::{gauss_legendre, pairwise_sum};
use crate::{Error, Result, C64};

pub use fit::{a_phi_residual, fit_a, generator_invariance, reconstruct, Evaluator, FitResult, InvarianceRow, ReconstructionResult};
pub use validate::{validate_nice_family, ConditionD, ValidationOptions};

/// Coefficients of one family, either at the working `w` or as a double
/// array `a_{n,m}` with `aₙ(w) = Σ_m a_{n,m} m^{−w}`.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientData {
    AtW(BTreeMap<i64, C64>),
    Double(BTreeMap<(i64, u64), C64>),
}

impl CoefficientData {
    /// `aₙ(w)`; single-`w` data is only available at the dataset's own `w`.
    pub fn at(&self, w: C64, dataset_w: C64) -> Result<BTreeMap<i64, C64>> {
        match self {
            CoefficientData::AtW(c) => {
                if w != dataset_w {
                    return Err(Error::Dataset(format!(
                        "coefficients are given at w = {dataset_w} only (asked for {w})"
                    )));
                }
                Ok(c.clone())
            }
            CoefficientData::Double(c) => {
                let mut out: BTreeMap<i64, Vec<C64>> = BTreeMap::new();
                for (&(n, m), &v) in c {
                    out.entry(n).or_default().push(v * (-w * (m as f64).ln()).exp());
                }
                Ok(out.into_iter().map(|(n, v)| (n, pairwise_sum(&v))).collect())
            }
        }
    }

    fn is_empty(&self) -> bool {
        match self {
            CoefficientData::AtW(c) => c.is_empty(),
            CoefficientData::Double(c) => c.is_empty(),
        }
    }
}

/// One `f_j` with its dual.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    pub j: usize,
    /// `y^{1−w}` coefficient.
    pub a: C64,
    /// `y^w` coefficient.
    pub b: C64,
    pub adual: C64,
    pub bdual: C64,
    pub coeffs: CoefficientData,
    pub dual: Option<CoefficientData>,
}

/// Declared envelope `|a_{n,m}| ≤ C |n|^α m^β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Growth {
    #[serde(rename = "C")]
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NiceFamilyDataset {
    pub level: i64,
    pub weight: Weight,
    pub w: C64,
    pub families: Vec<Family>,
    pub growth: Growth,
}

impl NiceFamilyDataset {
    /// Dataset from Eisenstein expansions: `direct[j]` is the expansion of
    /// `E_{j+1}` at infinity and `at_zero[j]` that at cusp 0, whose scaling
    /// matrix is the Fricke involution. The growth envelope is the smallest
    /// `C` for the given `alpha` (and `beta = 0`).
    pub fn from_expansions(direct: &[FourierExpansion], at_zero: &[FourierExpansion], alpha: f64) -> Result<Self> {
        if direct.is_empty() || direct.len() != at_zero.len() {
            return Err(Error::Dataset("need one expansion at infinity and one at cusp 0 per family".into()));
        }
        let first = &direct[0];
        let mut families = Vec::new();
        let mut c: f64 = 0.0;
        for (k, (f, z)) in direct.iter().zip(at_zero).enumerate() {
            if f.level != first.level || f.weight != first.weight || f.w != first.w || z.w != first.w {
                return Err(Error::Dataset("expansions disagree on level, weight or w".into()));
            }
            let chk = check_expansion(z);
            for (&n, v) in &f.coeffs {
                c = c.max(v.norm() / (n.unsigned_abs() as f64).powf(alpha));
            }
            families.push(Family {
                j: k + 1,
                a: f.b,
                b: f.a,
                adual: chk.b,
                bdual: chk.a,
                coeffs: CoefficientData::AtW(f.coeffs.clone()),
                dual: Some(CoefficientData::AtW(chk.coeffs.clone())),
            });
        }
        Ok(NiceFamilyDataset {
            level: first.level,
            weight: first.weight,
            w: first.w,
            families,
            growth: Growth { c, alpha, beta: 0.0 },
        })
    }

    pub fn family(&self, j: usize) -> Result<&Family> {
        self.families
            .iter()
            .find(|f| f.j == j)
            .ok_or_else(|| Error::Dataset(format!("no family with j = {j}")))
    }

    /// `f_j` as a finite expansion at the dataset's `w`.
    pub fn expansion(&self, j: usize) -> Result<FourierExpansion> {
        let f = self.family(j)?;
        Ok(self.make_expansion(j, f.b, f.a, f.coeffs.at(self.w, self.w)?))
    }

    /// `f̌_j` as a finite expansion; an error if the dual is missing.
    pub fn dual_expansion(&self, j: usize) -> Result<FourierExpansion> {
        let f = self.family(j)?;
        let dual = f
            .dual
            .as_ref()
            .ok_or_else(|| Error::Dataset(format!("family {j} has no dual coefficients")))?;
        Ok(self.make_expansion(j, f.bdual, f.adual, dual.at(self.w, self.w)?))
    }

    fn make_expansion(&self, j: usize, b: C64, a: C64, coeffs: BTreeMap<i64, C64>) -> FourierExpansion {
        FourierExpansion {
            level: self.level,
            weight: self.weight,
            i: j,
            j: 1,
            w: self.w,
            a: b,
            b: a,
            coeffs,
            meta: ExpansionMeta::default(),
        }
    }

    /// The dual dataset: every family swapped with its dual.
    pub fn dual(&self) -> Result<Self> {
        let mut out = self.clone();
        for f in out.families.iter_mut() {
            let dual = f
                .dual
                .take()
                .ok_or_else(|| Error::Dataset(format!("family {} has no dual coefficients", f.j)))?;
            f.dual = Some(std::mem::replace(&mut f.coeffs, dual));
            std::mem::swap(&mut f.a, &mut f.adual);
            std::mem::swap(&mut f.b, &mut f.bdual);
        }
        Ok(out)
    }

    /// Largest `|n|` over all families.
    pub fn n_max(&self) -> i64 {
        let keys = |c: &CoefficientData| -> i64 {
            match c {
                CoefficientData::AtW(m) => m.keys().map(|n| n.abs()).max().unwrap_or(0),
                CoefficientData::Double(m) => m.keys().map(|(n, _)| n.abs()).max().unwrap_or(0),
            }
        };
        self.families.iter().map(|f| keys(&f.coeffs)).max().unwrap_or(0)
    }

    pub(crate) fn require_nonempty(&self) -> Result<()> {
        if self.families.is_empty() || self.families.iter().all(|f| f.coeffs.is_empty()) {
            return Err(Error::Dataset("dataset has no families or no coefficients".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Dataset(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Dataset(e.to_string()))
    }
}

/// `b y^w + a y^{1−w} + Σ aₙ W_{sgn(n)l/2, w−1/2}(4π|n|y) e^{2πinx}` for family
/// `j`. Truncation makes this accurate only well inside the upper half-plane
/// (for the Eisenstein-derived data with `|n| ≤ 8`, about `1e-7` relative at
/// `Im z = 0.3`).
pub fn build_f(dataset: &NiceFamilyDataset, j: usize, z: C64, w: C64) -> Result<C64> {
    if w != dataset.w {
        return Err(Error::Dataset(format!(
            "constant terms are given at w = {} only (asked for {w})",
            dataset.w
        )));
    }
    if !(z.im > 0.0) {
        return Err(Error::Domain {
            function: "build_f",
            detail: format!("Im z = {} must be positive", z.im),
        });
    }
    dataset.expansion(j)?.eval(z)
}

/// Sum of the residues of `Λ_j(s) y^{−s}` at `s = ±w, ±(1−w)`:
///
/// `H τ₀(χ̌) (b̌ X^{−w} + ǎ X^{w−1}) − τ₀(χ)(b y^w + a y^{1−w})`, `X = 4ND²(1+u²)y`.
pub fn residue_term(dataset: &NiceFamilyDataset, j: usize, w: C64, u: f64, y: f64, chi: &DirichletCharacter) -> Result<C64> {
    let f = dataset.family(j)?;
    let h = h_factor(chi, dataset.level, dataset.weight, u)?;
    let chi_check = dual_character(chi)?;
    let d = chi.modulus() as f64;
    let x = dataset.level as f64 * d * d * (1.0 + u * u) * y;
    let pw = |base: f64, p: C64| (p * base.ln()).exp();
    let dual = h * gauss_sum(&chi_check, 0) * (f.bdual * pw(x, -w) + f.adual * pw(x, w - 1.0));
    let direct = gauss_sum(chi, 0) * (f.b * pw(y, w) + f.a * pw(y, 1.0 - w));
    Ok(dual - direct)
}

/// Result of a vertical-line Mellin inversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MellinInversion {
    pub value: C64,
    /// Integral of `|integrand|` over the outer tenth of `[−t_max, t_max]`.
    pub truncation: f64,
    /// Largest `|integrand|` seen.
    pub peak: f64,
}

/// `(1/2π) ∫_{−T}^{T} Λ(σ₀+it) y^{−σ₀−it} dt` by composite 20-point
/// Gauss–Legendre with about `nodes` nodes.
///
/// Fails if the integrand has not decayed: the largest magnitude over the
/// outer tenth of the range must be below `1e-3` of the peak.
pub fn mellin_invert<F>(lambda: F, y: f64, sigma0: f64, t_max: f64, nodes: usize) -> Result<MellinInversion>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    if !(t_max > 0.0 && y > 0.0) {
        return Err(Error::Invalid(format!("need t_max > 0 and y > 0 (got {t_max}, {y})")));
    }
    const ORDER: usize = 20;
    let panels = (nodes / ORDER).max(1);
    let (x, wts) = gauss_legendre::<f64>(ORDER);
    let width = 2.0 * t_max / panels as f64;
    let rule: Vec<(f64, f64)> = (0..panels)
        .flat_map(|p| {
            let c = -t_max + width * (p as f64 + 0.5);
            x.iter().zip(&wts).map(move |(xi, wi)| (c + xi * width / 2.0, wi * width / 2.0)).collect::<Vec<_>>()
        })
        .collect();
    let values = rule
        .par_iter()
        .map(|&(t, _)| {
            let s = C64::new(sigma0, t);
            Ok(lambda(s)? * (-s * y.ln()).exp() / (2.0 * PI))
        })
        .collect::<Result<Vec<C64>>>()?;
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let mut outer_max: f64 = 0.0;
    let mut truncation = 0.0;
    for ((t, wt), v) in rule.iter().zip(&values) {
        if t.abs() >= 0.9 * t_max {
            outer_max = outer_max.max(v.norm());
            truncation += wt * v.norm();
        }
    }
    if !(outer_max <= 1e-3 * peak) && peak > 0.0 {
        return Err(Error::Quadrature(format!(
            "Mellin inversion integrand does not decay: {outer_max:.3e} near |t| = {t_max} against peak {peak:.3e}"
        )));
    }
    let terms: Vec<C64> = rule.iter().zip(&values).map(|((_, wt), v)| v * wt).collect();
    Ok(MellinInversion {
        value: pairwise_sum(&terms),
        truncation,
        peak,
    })
}

#[derive(Serialize, Deserialize)]
struct RawCoeff {
    n: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<u64>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct RawConst {
    a: [f64; 2],
    b: [f64; 2],
    adual: [f64; 2],
    bdual: [f64; 2],
}

#[derive(Serialize, Deserialize)]
struct RawFamily {
    j: usize,
    #[serde(rename = "const")]
    constants: RawConst,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coeffs: Option<Vec<RawCoeff>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coeffs_at_w: Option<Vec<RawCoeff>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dual_coeffs: Option<Vec<RawCoeff>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dual_coeffs_at_w: Option<Vec<RawCoeff>>,
}

#[derive(Serialize, Deserialize)]
struct RawDataset {
    level: i64,
    weight: String,
    w: [f64; 2],
    families: Vec<RawFamily>,
    growth: Growth,
}

fn c(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn coeffs_to_raw(c: &CoefficientData) -> (Option<Vec<RawCoeff>>, Option<Vec<RawCoeff>>) {
    match c {
        CoefficientData::Double(m) => (
            Some(m.iter().map(|(&(n, m), v)| RawCoeff { n, m: Some(m), re: v.re, im: v.im }).collect()),
            None,
        ),
        CoefficientData::AtW(m) => (
            None,
            Some(m.iter().map(|(&n, v)| RawCoeff { n, m: None, re: v.re, im: v.im }).collect()),
        ),
    }
}

fn coeffs_from_raw(j: usize, double: Option<Vec<RawCoeff>>, at_w: Option<Vec<RawCoeff>>, what: &str) -> Result<Option<CoefficientData>> {
    let bad = |msg: String| Error::Dataset(format!("family {j}, {what}: {msg}"));
    match (double, at_w) {
        (Some(_), Some(_)) => Err(bad("give either the double array or the values at w, not both".into())),
        (None, None) => Ok(None),
        (Some(rows), None) => {
            let mut out = BTreeMap::new();
            for r in rows {
                let m = r.m.ok_or_else(|| bad(format!("row n = {} lacks m", r.n)))?;
                if r.n == 0 || m == 0 {
                    return Err(bad(format!("entry (n, m) = ({}, {m}) needs n != 0 and m >= 1", r.n)));
                }
                if out.insert((r.n, m), C64::new(r.re, r.im)).is_some() {
                    return Err(bad(format!("duplicate entry (n, m) = ({}, {m})", r.n)));
                }
            }
            Ok(Some(CoefficientData::Double(out)))
        }
        (None, Some(rows)) => {
            let mut out = BTreeMap::new();
            for r in rows {
                if r.n == 0 {
                    return Err(bad("n = 0 belongs in the constant terms".into()));
                }
                if r.m.is_some() {
                    return Err(bad(format!("row n = {} has an m index in a single-w list", r.n)));
                }
                if out.insert(r.n, C64::new(r.re, r.im)).is_some() {
                    return Err(bad(format!("duplicate entry n = {}", r.n)));
                }
            }
            Ok(Some(CoefficientData::AtW(out)))
        }
    }
}

impl Serialize for NiceFamilyDataset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let families = self
            .families
            .iter()
            .map(|f| {
                let (coeffs, coeffs_at_w) = coeffs_to_raw(&f.coeffs);
                let (dual_coeffs, dual_coeffs_at_w) = f.dual.as_ref().map(coeffs_to_raw).unwrap_or((None, None));
                RawFamily {
                    j: f.j,
                    constants: RawConst {
                        a: pair(f.a),
                        b: pair(f.b),
                        adual: pair(f.adual),
                        bdual: pair(f.bdual),
                    },
                    coeffs,
                    coeffs_at_w,
                    dual_coeffs,
                    dual_coeffs_at_w,
                }
            })
            .collect();
        RawDataset {
            level: self.level,
            weight: weight_label(self.weight),
            w: pair(self.w),
            families,
            growth: self.growth,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for NiceFamilyDataset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawDataset::deserialize(d)?;
        let err = |e: Error| D::Error::custom(e.to_string());
        if raw.level <= 0 || raw.level % 4 != 0 {
            return Err(D::Error::custom(format!("level {} is not a positive multiple of 4", raw.level)));
        }
        let weight = parse_weight_label(&raw.weight).map_err(err)?;
        let mut families = Vec::new();
        for f in raw.families {
            if f.j == 0 || families.iter().any(|g: &Family| g.j == f.j) {
                return Err(D::Error::custom(format!("family index j = {} is zero or repeated", f.j)));
            }
            let coeffs = coeffs_from_raw(f.j, f.coeffs, f.coeffs_at_w, "coefficients")
                .map_err(err)?
                .ok_or_else(|| D::Error::custom(format!("family {} has no coefficients", f.j)))?;
            let dual = coeffs_from_raw(f.j, f.dual_coeffs, f.dual_coeffs_at_w, "dual coefficients").map_err(err)?;
            families.push(Family {
                j: f.j,
                a: c(f.constants.a),
                b: c(f.constants.b),
                adual: c(f.constants.adual),
                bdual: c(f.constants.bdual),
                coeffs,
                dual,
            });
        }
        Ok(NiceFamilyDataset {
            level: raw.level,
            weight,
            w: c(raw.w),
            families,
            growth: raw.growth,
        })
    }
}
