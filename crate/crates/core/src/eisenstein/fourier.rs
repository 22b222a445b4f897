use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{EisensteinConfig, EisensteinSeries};
use crate::automorphy::Weight;
use crate::specfun::quad::pairwise_sum;
use crate::specfun::{whittaker_w, PrecisionBudget};
use crate::{Error, Result};

/// Extraction metadata carried alongside an expansion.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExpansionMeta {
    pub c_max: f64,
    pub heights: Vec<f64>,
    pub tail_estimate: f64,
    /// Largest relative disagreement of a coefficient between heights, over
    /// samples above the rounding floor (`1e-14` of the largest sample).
    #[serde(default)]
    pub height_spread: f64,
    #[serde(default)]
    pub x_samples: usize,
}

/// `A·y^w + B·y^{1−w} + Σ_{0<|n|≤n_max} a_n W_{sgn(n)l/2, w−1/2}(4π|n|y) e^{2πinx}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierExpansion {
    pub level: i64,
    pub weight: Weight,
    pub i: usize,
    pub j: usize,
    pub w: C64,
    pub a: C64,
    pub b: C64,
    pub coeffs: BTreeMap<i64, C64>,
    pub meta: ExpansionMeta,
}

impl FourierExpansion {
    pub fn n_max(&self) -> i64 {
        self.coeffs.keys().map(|n| n.abs()).max().unwrap_or(0)
    }

    pub fn coeff(&self, n: i64) -> C64 {
        self.coeffs.get(&n).copied().unwrap_or_default()
    }

    pub fn constant_term(&self, y: f64) -> C64 {
        self.a * (self.w * y.ln()).exp() + self.b * ((1.0 - self.w) * y.ln()).exp()
    }

    /// `W_{sgn(n)l/2, w−1/2}(4π|n|y)`.
    pub fn whittaker_factor(&self, n: i64, y: f64) -> Result<C64> {
        whittaker_normalizer(self.weight, self.w, n, y)
    }

    /// Value of the finite expansion at `z`.
    pub fn eval(&self, z: C64) -> Result<C64> {
        Ok(self.constant_term(z.im) + self.eval_nonconstant(z)?)
    }

    /// The expansion at `z` without its constant term.
    pub fn eval_nonconstant(&self, z: C64) -> Result<C64> {
        let mut terms = Vec::with_capacity(self.coeffs.len());
        for (&n, &an) in &self.coeffs {
            if an == C64::new(0.0, 0.0) {
                continue;
            }
            let phase = C64::from_polar(1.0, 2.0 * PI * (n as f64 * z.re).rem_euclid(1.0));
            terms.push(an * self.whittaker_factor(n, z.im)? * phase);
        }
        Ok(pairwise_sum(&terms))
    }

    /// The same expansion with every coefficient scaled by `f(n)` and the
    /// constant pair by `f(0)`.
    pub fn map_coefficients<F: Fn(i64) -> C64>(&self, f: F) -> Self {
        let mut out = self.clone();
        let f0 = f(0);
        out.a *= f0;
        out.b *= f0;
        for (n, v) in out.coeffs.iter_mut() {
            *v *= f(*n);
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Dataset(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Dataset(e.to_string()))
    }
}

pub(crate) fn whittaker_normalizer(weight: Weight, w: C64, n: i64, y: f64) -> Result<C64> {
    let kappa = C64::new(n.signum() as f64 * weight.value() / 2.0, 0.0);
    whittaker_w(kappa, w - 0.5, 4.0 * PI * n.unsigned_abs() as f64 * y, PrecisionBudget::default())
}

pub(crate) fn weight_label(w: Weight) -> String {
    format!("{}/2", (2.0 * w.value()) as i64)
}

pub(crate) fn parse_weight_label(s: &str) -> Result<Weight> {
    let bad = || Error::Dataset(format!("weight {s:?} is not of the form \"k/2\""));
    let (num, den) = s.split_once('/').ok_or_else(bad)?;
    if den.trim() != "2" {
        return Err(bad());
    }
    let k: i64 = num.trim().parse().map_err(|_| bad())?;
    Weight::new(k as f64 / 2.0).map_err(|_| bad())
}

#[derive(Serialize, Deserialize)]
struct CoeffRow {
    n: i64,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct RawExpansion {
    level: i64,
    weight: String,
    i: usize,
    j: usize,
    w: [f64; 2],
    #[serde(rename = "A")]
    a: [f64; 2],
    #[serde(rename = "B")]
    b: [f64; 2],
    coeffs: Vec<CoeffRow>,
    meta: ExpansionMeta,
}

impl Serialize for FourierExpansion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawExpansion {
            level: self.level,
            weight: weight_label(self.weight),
            i: self.i,
            j: self.j,
            w: [self.w.re, self.w.im],
            a: [self.a.re, self.a.im],
            b: [self.b.re, self.b.im],
            coeffs: self.coeffs.iter().map(|(&n, v)| CoeffRow { n, re: v.re, im: v.im }).collect(),
            meta: self.meta.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FourierExpansion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawExpansion::deserialize(d)?;
        let weight = parse_weight_label(&raw.weight).map_err(D::Error::custom)?;
        if raw.level <= 0 || raw.level % 4 != 0 {
            return Err(D::Error::custom(format!("level {} is not a positive multiple of 4", raw.level)));
        }
        let mut coeffs = BTreeMap::new();
        for row in raw.coeffs {
            if row.n == 0 {
                return Err(D::Error::custom("coefficient n = 0 belongs in A/B"));
            }
            if coeffs.insert(row.n, C64::new(row.re, row.im)).is_some() {
                return Err(D::Error::custom(format!("duplicate coefficient n = {}", row.n)));
            }
        }
        Ok(FourierExpansion {
            level: raw.level,
            weight,
            i: raw.i,
            j: raw.j,
            w: C64::new(raw.w[0], raw.w[1]),
            a: C64::new(raw.a[0], raw.a[1]),
            b: C64::new(raw.b[0], raw.b[1]),
            coeffs,
            meta: raw.meta,
        })
    }
}

/// Header data for [`extract_expansion`].
#[derive(Debug, Clone, Copy)]
pub struct ExtractionLabel {
    pub level: i64,
    pub weight: Weight,
    pub i: usize,
    pub j: usize,
    pub w: C64,
    pub c_max: f64,
    pub tail_estimate: f64,
}

// Grid centred on x = 0, which keeps σ_j z away from the real axis for the
// Fricke matrix.
fn grid_x(k: usize, nx: usize) -> f64 {
    -0.5 + k as f64 / nx as f64
}

/// Extract the expansion of a 1-periodic function `f` from samples on
/// uniform x-grids at the given heights.
pub fn extract_expansion<F>(
    f: F,
    label: ExtractionLabel,
    n_max: usize,
    heights: &[f64],
    x_samples: usize,
) -> Result<FourierExpansion>
where
    F: Fn(C64) -> C64 + Sync,
{
    if heights.len() < 2 {
        return Err(Error::IllConditioned("at least two heights are needed for (A, B)".into()));
    }
    if heights.iter().any(|&y| !(y > 0.0)) {
        return Err(Error::Invalid("heights must be positive".into()));
    }
    if x_samples < 4 * n_max.max(1) {
        return Err(Error::Invalid(format!("x_samples = {x_samples} is below 4·n_max")));
    }
    let w = label.w;
    // Least squares for (A, B) from c_0(y) = A y^w + B y^{1-w}.
    let rows: Vec<[C64; 2]> = heights
        .iter()
        .map(|&y| [(w * y.ln()).exp(), ((1.0 - w) * y.ln()).exp()])
        .collect();
    let m = nalgebra::DMatrix::from_fn(rows.len(), 2, |r, c| rows[r][c]);
    let sv = m.clone().svd(false, false).singular_values;
    let cond = sv[0] / sv[sv.len() - 1];
    if !(cond < 1e8) {
        return Err(Error::IllConditioned(format!(
            "heights {heights:?} give condition number {cond:.3e}"
        )));
    }

    let nx = x_samples;
    let samples: Vec<Vec<C64>> = heights
        .iter()
        .map(|&y| {
            (0..nx)
                .into_par_iter()
                .map(|k| f(C64::new(grid_x(k, nx), y)))
                .collect()
        })
        .collect();

    let coefficient_at = |vals: &[C64], n: i64| -> C64 {
        let terms: Vec<C64> = vals
            .iter()
            .enumerate()
            .map(|(k, v)| v * C64::from_polar(1.0, -2.0 * PI * (n as f64 * grid_x(k, nx)).rem_euclid(1.0)))
            .collect();
        pairwise_sum(&terms) / nx as f64
    };

    let c0 = nalgebra::DVector::from_iterator(heights.len(), samples.iter().map(|v| coefficient_at(v, 0)));
    let ab = m
        .svd(true, true)
        .solve(&c0, 1e-14)
        .map_err(|e| Error::IllConditioned(e.to_string()))?;

    let floors: Vec<f64> = samples
        .iter()
        .map(|v| 1e-14 * v.iter().fold(0.0f64, |m, x| m.max(x.norm())))
        .collect();
    let mut coeffs = BTreeMap::new();
    let mut spread: f64 = 0.0;
    for n in (-(n_max as i64)..=n_max as i64).filter(|&n| n != 0) {
        // Least squares across heights: c_n(y) = a_n W_n(y). Samples at the
        // rounding floor carry no information and are left out; a coefficient
        // with no informative sample is reported as zero.
        let mut num = C64::new(0.0, 0.0);
        let mut den = 0.0;
        let mut estimates = Vec::with_capacity(heights.len());
        for ((&y, vals), &floor) in heights.iter().zip(&samples).zip(&floors) {
            let cn = coefficient_at(vals, n);
            if cn.norm() <= floor {
                continue;
            }
            let wn = whittaker_normalizer(label.weight, w, n, y)?;
            num += wn.conj() * cn;
            den += wn.norm_sqr();
            estimates.push(cn / wn);
        }
        let mean = if den > 0.0 { num / den } else { C64::new(0.0, 0.0) };
        let scale = mean.norm();
        if scale > 0.0 {
            for v in &estimates {
                spread = spread.max((v - mean).norm() / scale);
            }
        }
        coeffs.insert(n, mean);
    }

    Ok(FourierExpansion {
        level: label.level,
        weight: label.weight,
        i: label.i,
        j: label.j,
        w,
        a: ab[0],
        b: ab[1],
        coeffs,
        meta: ExpansionMeta {
            c_max: label.c_max,
            heights: heights.to_vec(),
            tail_estimate: label.tail_estimate,
            height_spread: spread,
            x_samples: nx,
        },
    })
}

/// Expansion of `E_i|σ_j` where `j` indexes the singular cusps (1-based).
///
/// The series is re-summed in the frame of cusp `j`, so its truncation is
/// uniform along the horizontal sampling lines.
pub fn fourier_coefficients(
    series: &EisensteinSeries,
    j: usize,
    config: &EisensteinConfig,
) -> Result<FourierExpansion> {
    let ctx = series.context();
    let framed = if series.frame_index() == j {
        series.clone()
    } else {
        EisensteinSeries::framed(ctx, series.index(), j, &EisensteinConfig { c_max: series.c_max(), ..config.clone() })?
    };
    let nx = config.x_samples.unwrap_or_else(|| (8 * config.n_max).max(64));
    let y_min = config.heights.iter().copied().fold(f64::INFINITY, f64::min);
    let label = ExtractionLabel {
        level: ctx.level,
        weight: ctx.weight,
        i: series.index(),
        j,
        w: ctx.w,
        c_max: series.c_max(),
        tail_estimate: framed.tail_estimate(y_min),
    };
    extract_expansion(|z| framed.value(z), label, config.n_max, &config.heights, nx)
}
