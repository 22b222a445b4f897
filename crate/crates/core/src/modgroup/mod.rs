//! Γ₀(4N): matrices, cusps, scaling matrices, coset representatives for the
//! Eisenstein sum, and the generator family used as an invariance test set.

mod cusps;
mod matrix;
mod sample;

use serde::Serialize;

pub use cusps::{cusp_count, cusps, cusps_equivalent, find_cusp, singular_cusps, Cusp};
pub use matrix::{ModularMatrix, RealMatrix};
pub use sample::{invariance_points, random_gamma0, random_sl2};

use crate::arith::gcd;
use crate::{Error, Result};

/// `σ_a = A·diag(√h, 1/√h)`: sends ∞ to the cusp and conjugates its
/// stabilizer to the unit translation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingMatrix {
    pub cusp: Cusp,
    pub matrix: RealMatrix,
}

/// The scaling matrix of a cusp returned by [`cusps`]. For ∞ this is the
/// identity and for 0 the Fricke matrix `W_L`.
pub fn scaling_matrix(cusp: &Cusp, level: i64) -> Result<ScalingMatrix> {
    let list = cusps(level, crate::WeightClass::Half)?;
    if !list.iter().any(|c| c.p == cusp.p && c.q == cusp.q && c.width == cusp.width) {
        return Err(Error::UnknownCusp(format!("{cusp} at level {level}")));
    }
    let a = RealMatrix::from(cusp.base_matrix());
    Ok(ScalingMatrix { cusp: *cusp, matrix: a.mul(&RealMatrix::dilation(cusp.width as f64)) })
}

/// One coset `Γ_a γ` of the Eisenstein sum, grouped by right translations.
///
/// `A⁻¹γ` has bottom row `(c, d)` with `c > 0` and `0 ≤ d < c`, or `(0, 1)`;
/// the full coset family of the class is `{γ·T^k : k ∈ ℤ}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CosetClass {
    pub gamma: ModularMatrix,
    pub c: i64,
    pub d: i64,
}

impl CosetClass {
    /// Lower-left entry of `σ_a⁻¹ γ`, namely `√h·c`.
    pub fn scaled_c(&self, width: i64) -> f64 {
        (width as f64).sqrt() * self.c as f64
    }
}

/// Representatives of `Γ_a \ Γ₀(L) / Γ_∞` with `|lower-left of σ_a⁻¹γ| ≤ c_max`.
pub fn coset_reps(level: i64, cusp: &Cusp, c_max: f64) -> Result<Vec<CosetClass>> {
    if level <= 0 || level % 4 != 0 {
        return Err(Error::Level(level));
    }
    let a = cusp.base_matrix();
    let mut out = Vec::new();
    if a.in_gamma0(level) {
        out.push(CosetClass { gamma: a, c: 0, d: 1 });
    }
    let sqrt_h = (cusp.width as f64).sqrt();
    let mut c = 1i64;
    while sqrt_h * c as f64 <= c_max {
        for d in 0..c {
            if gcd(c, d) != 1 {
                continue;
            }
            let m0 = ModularMatrix::with_bottom_row(c, d)?;
            let found = (0..level).find_map(|k| {
                let g = a.mul(&ModularMatrix::translation(k)).mul(&m0);
                g.in_gamma0(level).then_some(g)
            });
            if let Some(gamma) = found {
                out.push(CosetClass { gamma, c, d });
            }
        }
        c += 1;
    }
    Ok(out)
}

/// Representatives of `Γ_a \ Γ₀(L) / Γ_b` for a pair of cusps, for sums
/// written in the frame of `b`.
///
/// `A_a⁻¹γA_b` has bottom row `(c, d)` with `c > 0` and `0 ≤ d < c·h_b`, or
/// `(0, 1)` when `a = b`; the lower-left entry of `σ_a⁻¹γσ_b` is
/// `√(h_a h_b)·c`, kept at most `c_max`.
pub fn double_coset_reps(level: i64, a: &Cusp, b: &Cusp, c_max: f64) -> Result<Vec<CosetClass>> {
    if level <= 0 || level % 4 != 0 {
        return Err(Error::Level(level));
    }
    let (ma, mb) = (a.base_matrix(), b.base_matrix());
    let mb_inv = mb.inv();
    let mut out = Vec::new();
    let search = |n0: ModularMatrix| {
        (0..level).find_map(|k| {
            let g = ma.mul(&ModularMatrix::translation(k)).mul(&n0).mul(&mb_inv);
            g.in_gamma0(level).then_some(g)
        })
    };
    if let Some(gamma) = search(ModularMatrix::IDENTITY) {
        out.push(CosetClass { gamma, c: 0, d: 1 });
    }
    let scale = ((a.width * b.width) as f64).sqrt();
    let mut c = 1i64;
    while scale * c as f64 <= c_max {
        for d in 0..c * b.width {
            if gcd(c, d) != 1 {
                continue;
            }
            if let Some(gamma) = search(ModularMatrix::with_bottom_row(c, d)?) {
                out.push(CosetClass { gamma, c, d });
            }
        }
        c += 1;
    }
    Ok(out)
}

/// Whether `γ₁` and `γ₂` lie in the same coset `Γ_a γ`: `γ₂γ₁⁻¹` must fix the
/// cusp, i.e. conjugate under `A` to `±T^{kh}`.
pub fn same_coset(cusp: &Cusp, g1: &ModularMatrix, g2: &ModularMatrix) -> bool {
    let a = cusp.base_matrix();
    let x = a.inv().mul(&g2.mul(&g1.inv())).mul(&a);
    matches!(x.as_translation(), Some((_, k)) if k % cusp.width == 0)
}

/// `T` together with `(t, m; L r, D)` for odd `D ≤ height`, `1 ≤ r ≤ D`
/// with `L r` coprime to `D`, where `D t − L m r = 1` with the least `m ≥ 0`.
pub fn generators(level: i64, height: i64) -> Result<Vec<ModularMatrix>> {
    if level <= 0 || level % 4 != 0 {
        return Err(Error::Level(level));
    }
    let mut out = vec![ModularMatrix::translation(1)];
    for dd in (1..=height).step_by(2) {
        for r in 1..=dd {
            let c = level * r;
            if gcd(c, dd) != 1 {
                continue;
            }
            let m = (0..dd).find(|&m| (1 + c * m) % dd == 0).expect("c invertible mod D");
            let t = (1 + c * m) / dd;
            out.push(ModularMatrix::new(t, m, c, dd)?);
        }
    }
    Ok(out)
}
