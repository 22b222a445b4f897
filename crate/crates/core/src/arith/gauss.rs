use std::collections::BTreeMap;

use serde::Serialize;

use super::{DirichletCharacter, Turn};
use crate::C64;

/// `τₙ(χ)` together with its inputs.
#[derive(Debug, Clone, Serialize)]
pub struct GaussSumValue {
    pub character: DirichletCharacter,
    pub shift: i64,
    pub value: C64,
}

/// `τₙ(χ) = ∑_{m mod D, (m,D)=1} χ(m) e^{2πimn/D}`.
///
/// Each summand is an exact turn; equal turns are merged before the single
/// conversion to floating point.
pub fn gauss_sum(chi: &DirichletCharacter, n: i64) -> C64 {
    let d = chi.modulus();
    let mut counts: BTreeMap<Turn, u64> = BTreeMap::new();
    for (m, t) in chi.units() {
        let shift = Turn::new((m as i64 * n.rem_euclid(d as i64)) % d as i64, d);
        *counts.entry(t.add(shift)).or_default() += 1;
    }
    counts
        .into_iter()
        .map(|(t, k)| t.to_complex() * k as f64)
        .sum()
}

impl GaussSumValue {
    pub fn compute(character: &DirichletCharacter, shift: i64) -> Self {
        GaussSumValue {
            character: character.clone(),
            shift,
            value: gauss_sum(character, shift),
        }
    }
}
