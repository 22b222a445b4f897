use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{fourier_coefficients, EisensteinConfig, EisensteinSeries, SpectralContext};
use crate::Result;

/// `p_{ij}(w)`: the `y^{1−w}` coefficient of `E_i|σ_j`.
pub fn scattering_entry(ctx: &SpectralContext, i: usize, j: usize, config: &EisensteinConfig) -> Result<C64> {
    let series = EisensteinSeries::new(ctx, i, config)?;
    Ok(fourier_coefficients(&series, j, config)?.b)
}

/// `Φ(w) = (p_{ij}(w))`, of size `m_N × m_N` (number of singular cusps).
pub fn scattering_matrix(ctx: &SpectralContext, config: &EisensteinConfig) -> Result<DMatrix<C64>> {
    let m = ctx.singular_cusps()?.len();
    let mut phi = DMatrix::zeros(m, m);
    for i in 1..=m {
        let series = EisensteinSeries::new(ctx, i, config)?;
        for j in 1..=m {
            phi[(i - 1, j - 1)] = fourier_coefficients(&series, j, config)?.b;
        }
    }
    Ok(phi)
}

/// `‖Φ(w)Φ(1−w) − I‖_max` for two supplied matrices.
///
/// `Φ(1−w)` needs the meromorphic continuation of the series, which the
/// truncated sums do not provide; callers supply it from another source.
pub fn scattering_product_residual(phi_w: &DMatrix<C64>, phi_1mw: &DMatrix<C64>) -> f64 {
    let prod = phi_w * phi_1mw;
    let id = DMatrix::<C64>::identity(prod.nrows(), prod.ncols());
    (prod - id).iter().fold(0.0, |m, v| m.max(v.norm()))
}
