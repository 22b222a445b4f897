//! Truncated Eisenstein series at singular cusps, Fourier extraction and
//! scattering matrices.

mod fourier;
mod scattering;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automorphy::{j_factor_real, MultiplierSystem, Weight};
use crate::modgroup::{cusps, double_coset_reps, scaling_matrix, Cusp, ModularMatrix, RealMatrix};
use crate::specfun::quad::pairwise_sum;
use crate::specfun::{gamma, principal_arg};
use crate::{Error, Result};

pub(crate) use fourier::{parse_weight_label, weight_label};
pub use fourier::{extract_expansion, fourier_coefficients, ExpansionMeta, ExtractionLabel, FourierExpansion};
pub use scattering::{scattering_entry, scattering_matrix, scattering_product_residual};

/// Level, weight, and spectral parameter shared by all series of a family.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralContext {
    pub level: i64,
    pub weight: Weight,
    pub w: C64,
}

impl SpectralContext {
    pub fn new(level: i64, weight: Weight, w: C64) -> Result<Self> {
        if level <= 0 || level % 4 != 0 {
            return Err(Error::Level(level));
        }
        Ok(SpectralContext { level, weight, w })
    }

    pub fn l(&self) -> f64 {
        self.weight.value()
    }

    pub fn multiplier(&self) -> MultiplierSystem {
        MultiplierSystem::new(self.level, self.weight.class()).expect("level checked")
    }

    /// Singular cusps in order; `E_i` is indexed by position in this list, from 1.
    pub fn singular_cusps(&self) -> Result<Vec<Cusp>> {
        crate::modgroup::singular_cusps(self.level, self.weight.class())
    }
}

/// Truncation and extraction settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EisensteinConfig {
    pub c_max: f64,
    pub n_max: usize,
    pub heights: Vec<f64>,
    /// `None` means `max(64, 8·n_max)`.
    pub x_samples: Option<usize>,
    /// Target size of the omitted tail of each translation sum.
    pub inner_tol: f64,
}

impl Default for EisensteinConfig {
    fn default() -> Self {
        EisensteinConfig {
            c_max: 200.0,
            n_max: 8,
            heights: vec![0.7, 1.1],
            x_samples: None,
            inner_tol: 1e-15,
        }
    }
}

/// Value of a truncated series together with an estimate of the omitted part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EisensteinValue {
    pub value: C64,
    pub tail_estimate: f64,
}

#[derive(Debug, Clone)]
struct ClassTerm {
    gamma: ModularMatrix,
    nu_bar: C64,
    /// Lower-left entry of `σ⁻¹γ`.
    scaled_c: f64,
}

/// `E_i(z, w) = Σ_{γ ∈ Γ_a\Γ₀(L)} conj(ν(γ))·(h_a|γ)(z)` with
/// `h_a(z) = j(σ_a, σ_a⁻¹z)·Im(σ_a⁻¹z)^w`, truncated to cosets whose
/// `σ_a⁻¹γ` has lower-left entry at most `c_max`.
///
/// A series can also be set up in the frame of another singular cusp `b`, in
/// which case it evaluates `E_i|σ_b` summed over `Γ_a\Γ₀(L)/Γ_b` with the
/// truncation applied to `σ_a⁻¹γσ_b`.
#[derive(Debug, Clone)]
pub struct EisensteinSeries {
    ctx: SpectralContext,
    index: usize,
    cusp: Cusp,
    frame: Cusp,
    frame_index: usize,
    sigma: RealMatrix,
    sigma_inv: RealMatrix,
    sigma_frame: RealMatrix,
    c_max: f64,
    inner_tol: f64,
    terms: Vec<ClassTerm>,
}

impl EisensteinSeries {
    /// The series attached to the `index`-th singular cusp (1-based).
    pub fn new(ctx: &SpectralContext, index: usize, config: &EisensteinConfig) -> Result<Self> {
        Self::framed(ctx, index, 1, config)
    }

    /// `E_i|σ_j` for singular-cusp indices `i`, `j` (1-based).
    pub fn framed(ctx: &SpectralContext, i: usize, j: usize, config: &EisensteinConfig) -> Result<Self> {
        let singular = ctx.singular_cusps()?;
        let pick = |k: usize| {
            singular.get(k.wrapping_sub(1)).copied().ok_or_else(|| {
                Error::UnknownCusp(format!("singular cusp index {k} (there are {})", singular.len()))
            })
        };
        Self::build(ctx, &pick(i)?, i, &pick(j)?, j, config)
    }

    /// The series attached to a given cusp, which must be singular.
    pub fn at_cusp(ctx: &SpectralContext, cusp: &Cusp, index: usize, config: &EisensteinConfig) -> Result<Self> {
        let inf = ctx.singular_cusps()?[0];
        Self::build(ctx, cusp, index, &inf, 1, config)
    }

    fn build(
        ctx: &SpectralContext,
        cusp: &Cusp,
        index: usize,
        frame: &Cusp,
        frame_index: usize,
        config: &EisensteinConfig,
    ) -> Result<Self> {
        if !cusp.singular {
            return Err(Error::NonSingularCusp(cusp.to_string()));
        }
        if !frame.singular {
            return Err(Error::NonSingularCusp(frame.to_string()));
        }
        if ctx.w.re < 1.5 {
            return Err(Error::Domain {
                function: "EisensteinSeries",
                detail: format!("Re(w) = {} is below 1.5", ctx.w.re),
            });
        }
        let nu = ctx.multiplier();
        let sigma = scaling_matrix(cusp, ctx.level)?.matrix;
        let sigma_frame = scaling_matrix(frame, ctx.level)?.matrix;
        let classes = double_coset_reps(ctx.level, cusp, frame, config.c_max)?;
        let scale = ((cusp.width * frame.width) as f64).sqrt();
        let terms = classes
            .iter()
            .map(|cl| {
                Ok(ClassTerm {
                    gamma: cl.gamma,
                    nu_bar: nu.eval(&cl.gamma)?.conj(),
                    scaled_c: scale * cl.c as f64,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EisensteinSeries {
            ctx: ctx.clone(),
            index,
            cusp: *cusp,
            frame: *frame,
            frame_index,
            sigma,
            sigma_inv: sigma.inv(),
            sigma_frame,
            c_max: config.c_max,
            inner_tol: config.inner_tol,
            terms,
        })
    }

    pub fn context(&self) -> &SpectralContext {
        &self.ctx
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn cusp(&self) -> &Cusp {
        &self.cusp
    }

    /// Index of the singular cusp whose frame the series is written in.
    pub fn frame_index(&self) -> usize {
        self.frame_index
    }

    pub fn frame(&self) -> &Cusp {
        &self.frame
    }

    pub fn c_max(&self) -> f64 {
        self.c_max
    }

    pub fn class_count(&self) -> usize {
        self.terms.len()
    }

    // (h_a|γ|σ_b)(z) = h_a(γσ_b z) / (j(γ, σ_b z)·j(σ_b, z)).
    fn h_slash(&self, g: &ModularMatrix, z: C64) -> C64 {
        let l = self.ctx.l();
        let zb = self.sigma_frame.act(z);
        let jb = j_factor_real(&self.sigma_frame, z, l);
        let (a, b, c, d) = (g.a as f64, g.b as f64, g.c as f64, g.d as f64);
        let q = c * zb + d;
        let gz = (a * zb + b) / q;
        let zeta = self.sigma_inv.act(gz);
        let jg = C64::from_polar(1.0, l * principal_arg(q));
        let js = j_factor_real(&self.sigma, zeta, l);
        let im_w = (self.ctx.w * zeta.im.ln()).exp();
        js * im_w / (jg * jb)
    }

    fn translation_range(&self, scaled_c: f64, y: f64) -> i64 {
        if scaled_c == 0.0 {
            return 0;
        }
        let rw = self.ctx.w.re;
        let scale = y.max(1.0).powf(rw) / (self.inner_tol * scaled_c.powf(2.0 * rw));
        let k = scale.powf(1.0 / (2.0 * rw - 1.0)).max(4.0);
        (k.min(20_000.0) as i64) + 2
    }

    fn class_sum(&self, t: &ClassTerm, z: C64) -> C64 {
        let k = self.translation_range(t.scaled_c, z.im);
        let vals: Vec<C64> = (-k..=k).map(|s| self.h_slash(&t.gamma, z + s as f64)).collect();
        t.nu_bar * pairwise_sum(&vals)
    }

    /// Truncated value; no checks on `z`.
    pub fn value(&self, z: C64) -> C64 {
        let parts: Vec<C64> = self.terms.par_iter().map(|t| self.class_sum(t, z)).collect();
        pairwise_sum(&parts)
    }

    /// Upper estimate of the omitted cosets: with `c' = √h·c`, each row of
    /// `c` contributes at most `h^{-w} y^{1-w} c^{1-2w} √π Γ(w-1/2)/Γ(w)`.
    pub fn tail_estimate(&self, y: f64) -> f64 {
        let rw = self.ctx.w.re;
        let h = (self.cusp.width * self.frame.width) as f64;
        let kw = std::f64::consts::PI.sqrt()
            * gamma(C64::new(rw - 0.5, 0.0)).map(|g| g.re).unwrap_or(f64::INFINITY)
            / gamma(C64::new(rw, 0.0)).map(|g| g.re).unwrap_or(1.0);
        let cm = (self.c_max / h.sqrt()).max(1.0);
        h.powf(-rw) * y.powf(1.0 - rw) * kw * cm.powf(2.0 - 2.0 * rw) / (2.0 * rw - 2.0)
    }

    /// `E_i(z, w)` with its tail estimate.
    pub fn eval(&self, z: C64) -> Result<EisensteinValue> {
        if !(z.im > 0.0) || !z.re.is_finite() {
            return Err(Error::Domain {
                function: "EisensteinSeries::eval",
                detail: format!("{z} is not in the upper half plane"),
            });
        }
        Ok(EisensteinValue { value: self.value(z), tail_estimate: self.tail_estimate(z.im) })
    }

    /// `(E_i|γ)(z)` for an integer matrix (series in its own frame).
    pub fn slash(&self, g: &ModularMatrix, z: C64) -> C64 {
        self.value(g.act(z)) / crate::automorphy::j_factor(g, z, self.ctx.l())
    }

    /// `(E_i|σ)(z)` for a real matrix.
    pub fn slash_real(&self, s: &RealMatrix, z: C64) -> C64 {
        self.value(s.act(z)) / j_factor_real(s, z, self.ctx.l())
    }

    /// `|E_i|γ(z) − ν(γ)E_i(z)|`.
    pub fn automorphy_residual(&self, g: &ModularMatrix, z: C64) -> Result<f64> {
        let nu = self.ctx.multiplier().eval(g)?;
        Ok((self.slash(g, z) - nu * self.value(z)).norm())
    }

    /// Relative residual `|Δ_l E − w(1−w)E| / |E|` with central differences
    /// of step `h`, where `Δ_l = −y²(∂ₓ² + ∂ᵧ²) + i l y ∂ₓ`.
    pub fn laplacian_residual(&self, z: C64, h: f64) -> f64 {
        let f = |dx: f64, dy: f64| self.value(z + C64::new(dx, dy));
        let f0 = f(0.0, 0.0);
        let (fxp, fxm) = (f(h, 0.0), f(-h, 0.0));
        let (fyp, fym) = (f(0.0, h), f(0.0, -h));
        let dxx = (fxp - 2.0 * f0 + fxm) / (h * h);
        let dyy = (fyp - 2.0 * f0 + fym) / (h * h);
        let dx = (fxp - fxm) / (2.0 * h);
        let y = z.im;
        let lap = -y * y * (dxx + dyy) + C64::new(0.0, self.ctx.l() * y) * dx;
        let w = self.ctx.w;
        (lap - w * (1.0 - w) * f0).norm() / f0.norm()
    }
}

/// All singular-cusp series of a context, in cusp order.
pub fn eisenstein_family(ctx: &SpectralContext, config: &EisensteinConfig) -> Result<Vec<EisensteinSeries>> {
    let n = ctx.singular_cusps()?.len();
    (1..=n).map(|i| EisensteinSeries::new(ctx, i, config)).collect()
}

/// Cusp at position `index` (1-based) among all cusps, singular or not.
pub fn cusp_by_index(ctx: &SpectralContext, index: usize) -> Result<Cusp> {
    cusps(ctx.level, ctx.weight.class())?
        .iter()
        .copied()
        .find(|c| c.index == index)
        .ok_or_else(|| Error::UnknownCusp(format!("index {index}")))
}
