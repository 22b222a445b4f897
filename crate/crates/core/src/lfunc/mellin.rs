use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_coprime, check_u, h_factor, twist};
use crate::arith::{dual_character, DirichletCharacter};
use crate::eisenstein::FourierExpansion;
use crate::specfun::quad::{kronrod_panels, pairwise_sum};
use crate::{Error, Result, C64};

/// Quadrature parameters for the Mellin routes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MellinOptions {
    /// Cut of the Riemann split as a multiple of `1/√(1+u²)`. The value is
    /// independent of the cut exactly when the Fricke relation holds.
    pub rho: f64,
    /// Panel width in `log y` near the bulk of the integrand.
    pub panel_width: f64,
    /// Panel width in `log y` far below `y = e^{-3}` (direct route only).
    pub coarse_width: f64,
    /// Integration stops once the integrand bound is below `e^{-tail}`.
    pub tail: f64,
}

impl Default for MellinOptions {
    fn default() -> Self {
        MellinOptions {
            rho: 1.0,
            panel_width: 0.05,
            coarse_width: 0.25,
            tail: 45.0,
        }
    }
}

/// Samples `g(e^v)` on a composite Gauss–Kronrod rule in `v = log y`.
struct LogGrid {
    v: Vec<f64>,
    wk: Vec<f64>,
    wg: Vec<f64>,
    g: Vec<C64>,
}

impl LogGrid {
    fn sample<F>(pieces: &[(f64, f64, f64)], f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<C64> + Sync,
    {
        let mut rule = Vec::new();
        for &(lo, hi, width) in pieces {
            if hi > lo {
                let panels = ((hi - lo) / width).ceil() as usize;
                rule.extend(kronrod_panels(lo, hi, panels));
            }
        }
        let g = rule.par_iter().map(|&(v, _, _)| f(v)).collect::<Result<Vec<_>>>()?;
        Ok(LogGrid {
            v: rule.iter().map(|r| r.0).collect(),
            wk: rule.iter().map(|r| r.1).collect(),
            wg: rule.iter().map(|r| r.2).collect(),
            g,
        })
    }

    /// `∫ g(e^v) e^{p v} dv` with the Kronrod–Gauss difference as error.
    fn integrate(&self, p: C64) -> (C64, f64) {
        let terms: Vec<C64> = (0..self.v.len()).map(|k| self.g[k] * (p * self.v[k]).exp()).collect();
        let k: Vec<C64> = terms.iter().zip(&self.wk).map(|(t, w)| t * w).collect();
        let g: Vec<C64> = terms.iter().zip(&self.wg).map(|(t, w)| t * w).collect();
        let kv = pairwise_sum(&k);
        (kv, (kv - pairwise_sum(&g)).norm())
    }
}

fn upper_height(sigma: f64, scale: f64, tail: f64) -> f64 {
    let mut y: f64 = 4.0;
    while 2.0 * std::f64::consts::PI * y - sigma.abs() * (scale * y).ln().max(0.0) < tail {
        y += 0.5;
    }
    y
}

fn fine_width(options: &MellinOptions, im_max: f64) -> f64 {
    options.panel_width.min(2.0 / im_max.max(1.0))
}

fn pole_guard(s: C64, poles: &[C64]) -> Result<()> {
    for p in poles {
        if (s - p).norm() < 1e-12 {
            return Err(Error::Pole {
                function: "completed L-function",
                at: format!("s = {s}"),
            });
        }
    }
    Ok(())
}

/// `Λ(s)` of the twist of a finite expansion `f` by the Riemann split at the
/// cut `ρ/√(1+u²)`, sampled once and evaluated for many `s`:
///
/// `κ^s Λ(s) = ∫_c^∞ G(Y) Y^{s−1} dY + H(1+u²)^{−s} ∫_{c̃}^∞ Ǧ(Y) Y^{−s−1} dY + polar part`,
///
/// with `G(Y)` the non-constant part of `f(·,χ)` at `(u+i)Y/κ`, `Ǧ(Y)` that of
/// `f̌(·,χ̌)` at `(−u+i)Y/κ`, and `c̃ = 1/((1+u²)c)`.
pub struct RiemannSplit {
    w: C64,
    u: f64,
    kappa: f64,
    h: C64,
    cut: f64,
    cut_check: f64,
    /// `(A, B)` of `f(·,χ)` and `(Ǎ, B̌)` of `f̌(·,χ̌)`.
    constants: [C64; 4],
    upper: LogGrid,
    lower: LogGrid,
}

impl RiemannSplit {
    /// Samples for `Re s ∈ [re_min, re_max]` and `|Im s| ≤ im_max`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        f: &FourierExpansion,
        check: &FourierExpansion,
        chi: &DirichletCharacter,
        u: f64,
        re_min: f64,
        re_max: f64,
        im_max: f64,
        options: &MellinOptions,
    ) -> Result<Self> {
        check_u(u)?;
        check_coprime(chi, f.level)?;
        if check.level != f.level || check.weight != f.weight || check.w != f.w {
            return Err(Error::Invalid("expansion and check expansion disagree on level, weight or w".into()));
        }
        if !(options.rho > 0.0) {
            return Err(Error::Invalid(format!("cut factor {} must be positive", options.rho)));
        }
        let chi_check = dual_character(chi)?;
        let ft = twist(f, chi)?.into_expansion();
        let fc = twist(check, &chi_check)?.into_expansion();
        let h = h_factor(chi, f.level, f.weight, u)?;
        let kappa = (f.level as f64).sqrt() * chi.modulus() as f64;
        let y0 = 1.0 / (1.0 + u * u).sqrt();
        let cut = options.rho * y0;
        let cut_check = y0 * y0 / cut;
        let sigma = re_min.abs().max(re_max.abs()).max(1.0);
        let y_hi = kappa * upper_height(sigma, kappa, options.tail);
        let width = fine_width(options, im_max);
        let upper = LogGrid::sample(&[(cut.ln(), y_hi.ln(), width)], |v| {
            let y = v.exp() / kappa;
            ft.eval_nonconstant(C64::new(u * y, y))
        })?;
        let lower = LogGrid::sample(&[(cut_check.ln(), y_hi.ln(), width)], |v| {
            let y = v.exp() / kappa;
            fc.eval_nonconstant(C64::new(-u * y, y))
        })?;
        Ok(RiemannSplit {
            w: f.w,
            u,
            kappa,
            h,
            cut,
            cut_check,
            constants: [ft.a, ft.b, fc.a, fc.b],
            upper,
            lower,
        })
    }

    pub fn h(&self) -> C64 {
        self.h
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `(Λ(s), error estimate)`.
    pub fn eval(&self, s: C64) -> Result<(C64, f64)> {
        let p = self.parts(s)?;
        Ok((p.scale * (p.integrals + p.polar), p.scale.norm() * p.error))
    }

    /// The pieces of `κ^s Λ(s) = integrals + polar`.
    pub fn parts(&self, s: C64) -> Result<SplitParts> {
        let w = self.w;
        pole_guard(s, &[w, 1.0 - w, -w, w - 1.0])?;
        let q = 1.0 + self.u * self.u;
        let lnk = self.kappa.ln();
        let pw = |x: f64, p: C64| (p * x.ln()).exp();
        let [a, b, ac, bc] = self.constants;
        let (i1, e1) = self.upper.integrate(s);
        let (i2, e2) = self.lower.integrate(-s);
        let hq = self.h * pw(q, -s);
        let (c, cc) = (self.cut, self.cut_check);
        let polar = hq * ac * (-w * lnk).exp() * pw(cc, w - s) / (s - w)
            + hq * bc * ((w - 1.0) * lnk).exp() * pw(cc, 1.0 - w - s) / (s + w - 1.0)
            - a * (-w * lnk).exp() * pw(c, s + w) / (s + w)
            - b * ((w - 1.0) * lnk).exp() * pw(c, s + 1.0 - w) / (s + 1.0 - w);
        Ok(SplitParts {
            integrals: i1 + hq * i2,
            polar,
            scale: (-s * lnk).exp(),
            error: e1 + hq.norm() * e2,
        })
    }
}

/// `κ^s Λ(s) = integrals + polar`; `scale = κ^{−s}`, `error` bounds the
/// quadrature error of `integrals`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitParts {
    pub integrals: C64,
    pub polar: C64,
    pub scale: C64,
    pub error: f64,
}

/// `Λ(s) = ∫₀^∞ G(y) y^{s−1} dy` for a finite (already twisted) expansion,
/// `G` its non-constant part on the ray `(u+i)y`. Valid for `Re s > Re w − 1`.
pub struct DirectMellin {
    grid: LogGrid,
    floor: f64,
}

impl DirectMellin {
    pub fn new(f: &FourierExpansion, u: f64, re_s: f64, im_max: f64, options: &MellinOptions) -> Result<Self> {
        check_u(u)?;
        let floor = f.w.re.abs().max((1.0 - f.w).re.abs()) - 1.0;
        let margin = re_s - floor;
        if !(margin > 0.0) {
            return Err(Error::Domain {
                function: "direct Mellin transform",
                detail: format!("Re s = {re_s} must exceed {floor}"),
            });
        }
        let v_lo = (-options.tail / margin).max(-80.0);
        let v_hi = upper_height(re_s, 1.0, options.tail).ln();
        let fine = fine_width(options, im_max);
        let coarse = options.coarse_width.min(2.0 / im_max.max(1.0)).max(fine);
        let split = (-3.0f64).max(v_lo);
        let grid = LogGrid::sample(&[(v_lo, split, coarse), (split, v_hi, fine)], |v| {
            let y = v.exp();
            f.eval_nonconstant(C64::new(u * y, y))
        })?;
        Ok(DirectMellin { grid, floor })
    }

    pub fn eval(&self, s: C64) -> Result<(C64, f64)> {
        if !(s.re > self.floor) {
            return Err(Error::Domain {
                function: "direct Mellin transform",
                detail: format!("Re s = {} must exceed {}", s.re, self.floor),
            });
        }
        Ok(self.grid.integrate(s))
    }
}
