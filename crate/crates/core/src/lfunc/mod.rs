//! Character twists, the check function, and completed L-functions.
//!
//! Levels are written `4N` throughout; `κ = 2√N·D = √(4N)·D` is the scale of
//! the Fricke involution `W_{4ND²}`.

mod mellin;
#[cfg(test)]
mod tests;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::arith::{epsilon_factor, gauss_sum, gcd, kronecker, DirichletCharacter};
use crate::automorphy::{j_factor_real, Weight};
use crate::eisenstein::FourierExpansion;
use crate::modgroup::RealMatrix;
use crate::specfun::{gamma, half_power, hyp2f1, PrecisionBudget, HYP2F1_RADIUS};
use crate::{Error, Result, C64};

pub use mellin::{DirectMellin, MellinOptions, RiemannSplit, SplitParts};

/// Largest `|u|` accepted anywhere in this module.
pub const U_MAX: f64 = 0.8;

fn check_u(u: f64) -> Result<()> {
    if !(u.abs() < U_MAX) {
        return Err(Error::Domain {
            function: "lfunc",
            detail: format!("|u| = {} must be below {U_MAX}", u.abs()),
        });
    }
    Ok(())
}

fn check_coprime(chi: &DirichletCharacter, level: i64) -> Result<()> {
    let d = chi.modulus() as i64;
    if gcd(d, level) != 1 {
        return Err(Error::Modulus {
            modulus: chi.modulus(),
            reason: "twists need a modulus coprime to the level",
        });
    }
    Ok(())
}

/// Expansion of `f(z, χ) = Σ_{m mod D} χ(m) f(z + m/D)` in coefficient form.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistedExpansion {
    pub base: FourierExpansion,
    pub character: DirichletCharacter,
    twisted: FourierExpansion,
}

impl TwistedExpansion {
    /// The twisted coefficients `τₙ(χ)aₙ` and constant pair `τ₀(χ)(A, B)`.
    pub fn expansion(&self) -> &FourierExpansion {
        &self.twisted
    }

    pub fn into_expansion(self) -> FourierExpansion {
        self.twisted
    }

    /// Coefficient form.
    pub fn eval(&self, z: C64) -> Result<C64> {
        self.twisted.eval(z)
    }

    /// Evaluator form: the character sum of translates of the base expansion.
    pub fn eval_translates(&self, z: C64) -> Result<C64> {
        let d = self.character.modulus() as f64;
        let mut acc = C64::new(0.0, 0.0);
        for (m, t) in self.character.units() {
            acc += t.to_complex() * self.base.eval(z + m as f64 / d)?;
        }
        Ok(acc)
    }
}

/// Twists an expansion by `χ`; the modulus must be coprime to the level.
pub fn twist(expansion: &FourierExpansion, chi: &DirichletCharacter) -> Result<TwistedExpansion> {
    check_coprime(chi, expansion.level)?;
    let twisted = expansion.map_coefficients(|n| gauss_sum(chi, n));
    Ok(TwistedExpansion {
        base: expansion.clone(),
        character: chi.clone(),
        twisted,
    })
}

/// `z ↦ Σ_{m mod D} χ(m) f(z + m/D)` for an arbitrary function `f`.
pub fn twist_evaluator<'a, F>(f: F, chi: &'a DirichletCharacter) -> impl Fn(C64) -> C64 + 'a
where
    F: Fn(C64) -> C64 + 'a,
{
    let d = chi.modulus() as f64;
    move |z| {
        chi.units()
            .map(|(m, t)| t.to_complex() * f(z + m as f64 / d))
            .sum()
    }
}

/// `f̌ = e^{πil/2} f|W_{4N}`, with `W_{4N} = (0, −1/√(4N); √(4N), 0)`.
pub fn check_function<F>(f: F, weight: Weight, level: i64) -> impl Fn(C64) -> C64
where
    F: Fn(C64) -> C64,
{
    let l = weight.value();
    let w = RealMatrix::fricke(level);
    let phase = C64::from_polar(1.0, PI * l / 2.0);
    move |z| phase * f(w.act(z)) / j_factor_real(&w, z, l)
}

/// The check expansion from the expansion of `f|W_{4N}` (the expansion at
/// cusp 0, whose scaling matrix is `W_{4N}`): every coefficient times
/// `e^{πil/2}`.
pub fn check_expansion(at_zero: &FourierExpansion) -> FourierExpansion {
    let phase = C64::from_polar(1.0, PI * at_zero.weight.value() / 2.0);
    at_zero.map_coefficients(|_| phase)
}

/// `e^{−πil/2} conj(χ(−4N)) (4N/D) ε_D`, the constant in
/// `f(·,χ)|W_{4ND²} = (this) · f̌(·, χ̌)`.
pub fn fricke_prefactor(chi: &DirichletCharacter, level: i64, weight: Weight) -> Result<C64> {
    check_coprime(chi, level)?;
    let d = chi.modulus() as i64;
    let eps = epsilon_factor(d, weight.class())?;
    let sym = kronecker(level, d) as f64;
    Ok(C64::from_polar(1.0, -PI * weight.value() / 2.0) * chi.eval(-level).conj() * sym * eps)
}

/// `H = conj(χ(−4N)) (4N/D) ε_D ((1+iu)/(1−iu))^{l/2}`.
pub fn h_factor(chi: &DirichletCharacter, level: i64, weight: Weight, u: f64) -> Result<C64> {
    check_u(u)?;
    let d = chi.modulus() as i64;
    check_coprime(chi, level)?;
    let eps = epsilon_factor(d, weight.class())?;
    let sym = kronecker(level, d) as f64;
    let ratio = C64::new(1.0, u) / C64::new(1.0, -u);
    Ok(chi.eval(-level).conj() * sym * eps * half_power(ratio, weight.value())?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

/// `L^±(s, χ) = Σ_{±n>0} τₙ(χ) aₙ |n|^{−s}` over the coefficients present.
///
/// This is a finite sum: for an Eisenstein series the omitted tail is not
/// small unless `Re s` is well beyond `Re w`.
pub fn l_series(expansion: &FourierExpansion, chi: &DirichletCharacter, sign: Sign, s: C64) -> C64 {
    expansion
        .coeffs
        .iter()
        .filter(|(&n, _)| match sign {
            Sign::Plus => n > 0,
            Sign::Minus => n < 0,
        })
        .map(|(&n, &a)| gauss_sum(chi, n) * a * (-s * (n.unsigned_abs() as f64).ln()).exp())
        .sum()
}

/// The row `c(s, w; u)` with `Λ = c · (L⁺, L⁻)ᵀ`.
pub fn c_tensor(s: C64, w: C64, u: f64, weight: Weight) -> Result<[C64; 2]> {
    check_u(u)?;
    let half_l = weight.value() / 2.0;
    let budget = PrecisionBudget::default();
    let front = gamma(w + s)? * gamma(s - w + 1.0)? * (-s * (4.0 * PI).ln()).exp();
    let a = s - w + 1.0;
    let b = s + w;
    let zp = C64::new(0.5, u / 2.0);
    let zm = C64::new(0.5, -u / 2.0);
    debug_assert!(zp.norm() <= HYP2F1_RADIUS);
    let cp = s + 1.0 - half_l;
    let cm = s + 1.0 + half_l;
    let plus = hyp2f1(a, b, cp, zp, budget)? / gamma(cp)?;
    let minus = hyp2f1(a, b, cm, zm, budget)? / gamma(cm)?;
    Ok([front * plus, front * minus])
}

/// How a completed L-value was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// `c(s,w;u)·(L⁺, L⁻)ᵀ` from the coefficients.
    CTensor,
    /// Riemann-split quadrature using the expansion and its check expansion.
    MellinQuadrature,
    /// Quadrature of `∫₀^∞ (f − constant terms) y^{s−1} dy` directly; needs
    /// `Re s > Re w − 1` and a finite expansion.
    MellinDirect,
}

/// A value of `Λ(s, w, u, χ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletedLValue {
    pub s: C64,
    pub w: C64,
    pub u: f64,
    pub modulus: u64,
    pub value: C64,
    pub route: Route,
    /// Quadrature error estimate (0 for the c-tensor route).
    pub error: f64,
    /// Largest `|n|` of the coefficients used.
    pub n_max: i64,
}

/// Data for `Λ_j`: the expansion of `f` at infinity and, for the
/// Riemann-split route, its check expansion `f̌`. Both are untwisted.
#[derive(Debug, Clone, Copy)]
pub struct LambdaData<'a> {
    pub expansion: &'a FourierExpansion,
    pub check: Option<&'a FourierExpansion>,
}

/// `Λ(s, w, u, χ)` by the chosen route.
pub fn lambda_completed(
    data: LambdaData<'_>,
    chi: &DirichletCharacter,
    s: C64,
    u: f64,
    route: Route,
    options: &MellinOptions,
) -> Result<CompletedLValue> {
    check_u(u)?;
    let f = data.expansion;
    let (value, error) = match route {
        Route::CTensor => {
            check_coprime(chi, f.level)?;
            let c = c_tensor(s, f.w, u, f.weight)?;
            let lp = l_series(f, chi, Sign::Plus, s);
            let lm = l_series(f, chi, Sign::Minus, s);
            (c[0] * lp + c[1] * lm, 0.0)
        }
        Route::MellinQuadrature => {
            let check = data.check.ok_or_else(|| {
                Error::Invalid("the Riemann-split route needs the check expansion".into())
            })?;
            let split = RiemannSplit::new(f, check, chi, u, s.re, s.re, s.im.abs(), options)?;
            split.eval(s)?
        }
        Route::MellinDirect => {
            let tw = twist(f, chi)?;
            let direct = DirectMellin::new(tw.expansion(), u, s.re, s.im.abs(), options)?;
            direct.eval(s)?
        }
    };
    Ok(CompletedLValue {
        s,
        w: f.w,
        u,
        modulus: chi.modulus(),
        value,
        route,
        error,
        n_max: f.n_max(),
    })
}
