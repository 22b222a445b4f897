use rand::Rng;

use crate::C64;

use super::ModularMatrix;
use crate::arith::gcd;

/// A random element of SL₂(ℤ) with all entries at most `bound` in absolute
/// value: a random coprime bottom row, completed and shifted by `T^k`.
pub fn random_sl2<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> ModularMatrix {
    loop {
        let c = rng.gen_range(-bound..=bound);
        let d = rng.gen_range(-bound..=bound);
        if gcd(c, d) != 1 {
            continue;
        }
        let m = ModularMatrix::with_bottom_row(c, d).expect("coprime row");
        let m = ModularMatrix::translation(rng.gen_range(-3..=3)).mul(&m);
        if m.a.abs() <= bound && m.b.abs() <= bound {
            return m;
        }
    }
}

/// A random element of Γ₀(level) with entries at most `bound`.
pub fn random_gamma0<R: Rng + ?Sized>(rng: &mut R, level: i64, bound: i64) -> ModularMatrix {
    loop {
        let c = level * rng.gen_range(-(bound / level)..=bound / level);
        let d = rng.gen_range(-bound..=bound);
        if gcd(c, d) != 1 {
            continue;
        }
        let m = ModularMatrix::translation(rng.gen_range(-2..=2)).mul(&ModularMatrix::with_bottom_row(c, d).expect("coprime row"));
        if m.a.abs() <= bound && m.b.abs() <= bound {
            return m;
        }
    }
}

/// Deterministic `x` offsets in `[−0.3, 0.3]` (golden-ratio sequence).
fn offsets(k: usize) -> impl Iterator<Item = f64> {
    (1..=k).map(|i| 0.6 * (i as f64 * 0.618_033_988_749_895).fract() - 0.3)
}

/// `k` points for comparing `f(γz)` with `f(z)`. For `c ≠ 0` they lie on the
/// arc `|cz + d| = 1` near its top, where `Im z = Im γz` is close to `1/|c|`,
/// the largest height both can reach; for `c = 0` they are at height 0.8–1.
pub fn invariance_points(g: &ModularMatrix, k: usize) -> Vec<C64> {
    if g.c == 0 {
        return offsets(k)
            .zip(1..)
            .map(|(x, i)| C64::new(x, 0.8 + 0.2 * (i as f64 * 0.414_213_562_373_095).fract()))
            .collect();
    }
    let c = g.c as f64;
    let base = -(g.d as f64) / c;
    offsets(k).map(|x| C64::new(base + x / c, (1.0 - x * x).sqrt() / c.abs())).collect()
}
