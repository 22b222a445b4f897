//! Shared, lazily built Eisenstein data for unit tests (level 4, l = 1/2,
//! w = 5/2).

use std::sync::OnceLock;

use crate::automorphy::Weight;
use crate::eisenstein::{fourier_coefficients, EisensteinConfig, EisensteinSeries, FourierExpansion, SpectralContext};
use crate::C64;

pub(crate) struct Fixture {
    /// `E_1`, `E_2` in the frame at infinity.
    pub series: [EisensteinSeries; 2],
    /// `expansions[i][j]`: expansion of `E_{i+1}` at cusp `j+1`.
    pub expansions: [[FourierExpansion; 2]; 2],
}

pub(crate) fn level4() -> &'static Fixture {
    static CELL: OnceLock<Fixture> = OnceLock::new();
    CELL.get_or_init(|| {
        let ctx = SpectralContext::new(4, Weight::HALF, C64::new(2.5, 0.0)).unwrap();
        let config = EisensteinConfig::default();
        let series = [1, 2].map(|i| EisensteinSeries::new(&ctx, i, &config).unwrap());
        let expansions = [0, 1].map(|i| [1, 2].map(|j| fourier_coefficients(&series[i], j, &config).unwrap()));
        Fixture { series, expansions }
    })
}
