//! Exact integer and character arithmetic.
//!
//! Character values are kept as exact fractions of a turn and only become
//! floating point complex numbers at evaluation boundaries.

mod character;
mod gauss;
mod kronecker;

pub use character::{enumerate_characters, DirichletCharacter, Turn};
pub use gauss::{gauss_sum, GaussSumValue};
pub use kronecker::{jacobi, kronecker};

use crate::automorphy::WeightClass;
use crate::{Error, Result, C64};

/// `gcd` on signed integers, always non-negative.
pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i64
}

/// Extended Euclid: returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Prime factorisation by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Positive divisors in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// The factor `ε_D`: 1 for `D ≡ 1 (mod 4)`, otherwise `∓i` by weight class.
pub fn epsilon_factor(d: i64, weight: WeightClass) -> Result<C64> {
    if d.rem_euclid(2) == 0 {
        return Err(Error::Modulus {
            modulus: d.unsigned_abs(),
            reason: "epsilon factor needs an odd modulus",
        });
    }
    Ok(match (d.rem_euclid(4), weight) {
        (1, _) => C64::new(1.0, 0.0),
        (_, WeightClass::Half) => C64::new(0.0, -1.0),
        (_, WeightClass::ThreeHalves) => C64::new(0.0, 1.0),
    })
}

/// The dual character `χ̌(r) = (r/D) · conj(χ(r))` for odd `D`.
pub fn dual_character(chi: &DirichletCharacter) -> Result<DirichletCharacter> {
    let d = chi.modulus();
    if d % 2 == 0 {
        return Err(Error::Modulus {
            modulus: d,
            reason: "the dual character is only defined for odd moduli",
        });
    }
    chi.map_values(|r, t| {
        let sym = jacobi(r as i64, d as i64);
        let flip = if sym < 0 { Turn::HALF } else { Turn::ZERO };
        t.conj().add(flip)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_table() {
        assert_eq!(epsilon_factor(1, WeightClass::Half).unwrap(), C64::new(1.0, 0.0));
        assert_eq!(epsilon_factor(3, WeightClass::Half).unwrap(), C64::new(0.0, -1.0));
        assert_eq!(epsilon_factor(7, WeightClass::ThreeHalves).unwrap(), C64::new(0.0, 1.0));
        assert_eq!(epsilon_factor(5, WeightClass::ThreeHalves).unwrap(), C64::new(1.0, 0.0));
        assert!(epsilon_factor(4, WeightClass::Half).is_err());
    }

    #[test]
    fn dual_is_involution_mod_5() {
        for chi in enumerate_characters(5) {
            let back = dual_character(&dual_character(&chi).unwrap()).unwrap();
            assert_eq!(back, chi);
        }
    }

    #[test]
    fn dual_of_real_character_mod_3_is_principal() {
        let chars = enumerate_characters(3);
        let real = chars.iter().find(|c| !c.is_principal()).unwrap();
        assert!(dual_character(real).unwrap().is_principal());
    }

    #[test]
    fn dual_of_principal_mod_5_is_legendre() {
        let chars = enumerate_characters(5);
        let principal = chars.iter().find(|c| c.is_principal()).unwrap();
        let dual = dual_character(principal).unwrap();
        for r in 1..5 {
            let expect = jacobi(r, 5) as f64;
            assert!((dual.eval(r) - C64::new(expect, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn dual_rejects_even_modulus() {
        let chi = &enumerate_characters(4)[0];
        assert!(dual_character(chi).is_err());
    }

    #[test]
    fn totient_and_divisors() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(97), 96);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        let (g, x, y) = ext_gcd(240, 46);
        assert_eq!(g, 2);
        assert_eq!(240 * x + 46 * y, 2);
    }
}
