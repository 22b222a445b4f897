use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64 as C64;
use serde::{Serialize, Serializer};

use super::{ModularMatrix, RealMatrix};
use crate::arith::{divisors, euler_phi, gcd};
use crate::automorphy::{r_direct_real, MultiplierSystem, Weight, WeightClass};
use crate::{Error, Result};

/// A cusp of Γ₀(L), `p/q` in lowest terms with `q > 0`, or ∞ stored as `1/0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cusp {
    pub p: i64,
    pub q: i64,
    /// Position in the fixed ordering, starting at 1 for ∞.
    pub index: usize,
    pub singular: bool,
    /// Width: smallest `h > 0` with `A·T^h·A⁻¹ ∈ Γ₀(L)`.
    pub width: i64,
}

impl Cusp {
    pub fn is_infinity(&self) -> bool {
        self.q == 0
    }

    pub fn is_zero(&self) -> bool {
        self.p == 0
    }

    /// The matrix `A ∈ SL₂(ℤ)` with `A(∞) = p/q` used to build the scaling matrix.
    pub fn base_matrix(&self) -> ModularMatrix {
        if self.is_infinity() {
            ModularMatrix::IDENTITY
        } else if self.is_zero() {
            ModularMatrix::S
        } else {
            ModularMatrix::with_first_column(self.p, self.q).expect("cusp in lowest terms")
        }
    }

    /// Generator `A·T^h·A⁻¹` of the stabilizer, modulo ±I.
    pub fn stabilizer_generator(&self) -> ModularMatrix {
        let a = self.base_matrix();
        a.mul(&ModularMatrix::translation(self.width)).mul(&a.inv())
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinity() {
            write!(f, "oo")
        } else if self.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.p, self.q)
        }
    }
}

impl Serialize for Cusp {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Row {
            p: i64,
            q: i64,
            index: usize,
            singular: bool,
            width: i64,
        }
        Row { p: self.p, q: self.q, index: self.index, singular: self.singular, width: self.width }.serialize(s)
    }
}

/// Number of cusps of Γ₀(L): `Σ_{d | L} φ(gcd(d, L/d))`.
pub fn cusp_count(level: i64) -> usize {
    let l = level as u64;
    divisors(l)
        .into_iter()
        .map(|d| euler_phi(gcd(d as i64, (l / d) as i64) as u64) as usize)
        .sum()
}

/// Whether `p1/q1` and `p2/q2` (lowest terms, ∞ = 1/0) are Γ₀(L)-equivalent,
/// by searching the stabilizer coset `A₂·T^k·A₁⁻¹`.
pub fn cusps_equivalent(level: i64, c1: (i64, i64), c2: (i64, i64)) -> bool {
    let a1 = ModularMatrix::with_first_column(c1.0, c1.1).expect("coprime");
    let a2 = ModularMatrix::with_first_column(c2.0, c2.1).expect("coprime");
    let a1i = a1.inv();
    (0..level).any(|k| a2.mul(&ModularMatrix::translation(k)).mul(&a1i).in_gamma0(level))
}

fn width(level: i64, a: &ModularMatrix) -> i64 {
    let ai = a.inv();
    (1..=level)
        .find(|&h| a.mul(&ModularMatrix::translation(h)).mul(&ai).in_gamma0(level))
        .expect("h = level always works")
}

/// `ν(g)` times the phase that `h_a|g` picks up relative to `h_a`; the cusp is
/// singular exactly when this is 1.
pub(crate) fn singular_phase(cusp: &Cusp, level: i64, class: WeightClass) -> Result<C64> {
    let weight = match class {
        WeightClass::Half => Weight::HALF,
        WeightClass::ThreeHalves => Weight::THREE_HALVES,
    };
    let l = weight.value();
    let nu = MultiplierSystem::new(level, class)?;
    let g = cusp.stabilizer_generator();
    let sigma = RealMatrix::from(cusp.base_matrix()).mul(&RealMatrix::dilation(cusp.width as f64));
    let t = RealMatrix::from(ModularMatrix::translation(1));
    let z = C64::new(0.123, 0.917);
    let r1 = r_direct_real(&sigma, &t, z, l);
    let r2 = r_direct_real(&RealMatrix::from(g), &sigma, z, l);
    Ok(nu.eval(&g)? * r1 / r2)
}

type CuspKey = (i64, WeightClass);

fn cache() -> &'static Mutex<HashMap<CuspKey, Arc<Vec<Cusp>>>> {
    static CACHE: OnceLock<Mutex<HashMap<CuspKey, Arc<Vec<Cusp>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Inequivalent cusps of Γ₀(L) in the fixed order: ∞ first, 0 last, the rest
/// by smallest denominator and then smallest non-negative numerator.
pub fn cusps(level: i64, class: WeightClass) -> Result<Arc<Vec<Cusp>>> {
    if level <= 0 || level % 4 != 0 {
        return Err(Error::Level(level));
    }
    if let Some(v) = cache().lock().expect("cusp cache").get(&(level, class)) {
        return Ok(v.clone());
    }
    let mut reps: Vec<(i64, i64)> = vec![(1, 0), (0, 1)];
    for q in divisors(level as u64).into_iter().map(|q| q as i64) {
        if q == 1 || q == level {
            continue;
        }
        for p in 0..q {
            if gcd(p, q) != 1 {
                continue;
            }
            if !reps.iter().any(|&r| cusps_equivalent(level, r, (p, q))) {
                reps.push((p, q));
            }
        }
    }
    let zero = reps.remove(1);
    reps.push(zero);
    let expected = cusp_count(level);
    if reps.len() != expected {
        return Err(Error::Invalid(format!(
            "cusp enumeration found {} classes, expected {expected}",
            reps.len()
        )));
    }
    let mut out = Vec::with_capacity(reps.len());
    for (i, (p, q)) in reps.into_iter().enumerate() {
        let mut cusp = Cusp { p, q, index: i + 1, singular: false, width: 0 };
        cusp.width = width(level, &cusp.base_matrix());
        cusp.singular = (singular_phase(&cusp, level, class)? - 1.0).norm() < 1e-9;
        out.push(cusp);
    }
    let out = Arc::new(out);
    cache().lock().expect("cusp cache").insert((level, class), out.clone());
    Ok(out)
}

/// The singular cusps in order; Eisenstein series are indexed by these.
pub fn singular_cusps(level: i64, class: WeightClass) -> Result<Vec<Cusp>> {
    Ok(cusps(level, class)?.iter().copied().filter(|c| c.singular).collect())
}

/// Look a cusp up by `p/q`, accepting any equivalent representative.
pub fn find_cusp(level: i64, class: WeightClass, p: i64, q: i64) -> Result<Cusp> {
    let g = gcd(p, q);
    if g == 0 {
        return Err(Error::UnknownCusp(format!("{p}/{q}")));
    }
    let (p, q) = if q < 0 || (q == 0 && p < 0) { (-p / g, -q / g) } else { (p / g, q / g) };
    cusps(level, class)?
        .iter()
        .copied()
        .find(|c| cusps_equivalent(level, (c.p, c.q), (p, q)))
        .ok_or_else(|| Error::UnknownCusp(format!("{p}/{q}")))
}
