use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::arith::ext_gcd;
use crate::{Error, Result};

/// An element of SL₂(ℤ).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[i64; 4]", into = "[i64; 4]")]
pub struct ModularMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl ModularMatrix {
    pub const IDENTITY: ModularMatrix = ModularMatrix { a: 1, b: 0, c: 0, d: 1 };
    pub const S: ModularMatrix = ModularMatrix { a: 0, b: -1, c: 1, d: 0 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = a as i128 * d as i128 - b as i128 * c as i128;
        if det != 1 {
            return Err(Error::Invalid(format!("({a},{b};{c},{d}) has determinant {det}")));
        }
        Ok(ModularMatrix { a, b, c, d })
    }

    /// `(1, h; 0, 1)`.
    pub fn translation(h: i64) -> Self {
        ModularMatrix { a: 1, b: h, c: 0, d: 1 }
    }

    /// Some matrix with bottom row `(c, d)`, for coprime `c, d`.
    pub fn with_bottom_row(c: i64, d: i64) -> Result<Self> {
        let (g, x, y) = ext_gcd(d, c);
        if g.abs() != 1 {
            return Err(Error::Invalid(format!("bottom row ({c}, {d}) is not coprime")));
        }
        // x d + y c = g, so (g x, -g y; c, d) has determinant g² = 1.
        ModularMatrix::new(g * x, -g * y, c, d)
    }

    /// Some matrix sending ∞ to `p/q` (first column `(p, q)`).
    pub fn with_first_column(p: i64, q: i64) -> Result<Self> {
        let (g, x, y) = ext_gcd(p, q);
        if g.abs() != 1 {
            return Err(Error::Invalid(format!("column ({p}, {q}) is not coprime")));
        }
        ModularMatrix::new(p, -g * y, q, g * x)
    }

    pub fn mul(&self, o: &Self) -> Self {
        ModularMatrix {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inv(&self) -> Self {
        ModularMatrix { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn neg(&self) -> Self {
        ModularMatrix { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inv() } else { *self };
        (0..k.unsigned_abs()).fold(Self::IDENTITY, |acc, _| acc.mul(&base))
    }

    pub fn in_gamma0(&self, level: i64) -> bool {
        self.c.rem_euclid(level) == 0
    }

    pub fn act(&self, z: C64) -> C64 {
        (self.a as f64 * z + self.b as f64) / (self.c as f64 * z + self.d as f64)
    }

    /// `±(1, h; 0, 1)` as `(sign, h)`, if the matrix is a signed translation.
    pub fn as_translation(&self) -> Option<(i64, i64)> {
        if self.c == 0 && self.a == self.d && self.a.abs() == 1 {
            Some((self.a, self.b * self.a))
        } else {
            None
        }
    }
}

impl TryFrom<[i64; 4]> for ModularMatrix {
    type Error = Error;
    fn try_from(e: [i64; 4]) -> Result<Self> {
        ModularMatrix::new(e[0], e[1], e[2], e[3])
    }
}

impl From<ModularMatrix> for [i64; 4] {
    fn from(m: ModularMatrix) -> Self {
        [m.a, m.b, m.c, m.d]
    }
}

impl fmt::Display for ModularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{};{},{})", self.a, self.b, self.c, self.d)
    }
}

/// A real 2×2 matrix of determinant one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealMatrix {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl RealMatrix {
    pub const IDENTITY: RealMatrix = RealMatrix { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    /// `diag(√h, 1/√h)`.
    pub fn dilation(h: f64) -> Self {
        let s = h.sqrt();
        RealMatrix { a: s, b: 0.0, c: 0.0, d: 1.0 / s }
    }

    /// The Fricke involution `W_L = (0, -1/√L; √L, 0)`.
    pub fn fricke(level: i64) -> Self {
        let s = (level as f64).sqrt();
        RealMatrix { a: 0.0, b: -1.0 / s, c: s, d: 0.0 }
    }

    pub fn mul(&self, o: &Self) -> Self {
        RealMatrix {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inv(&self) -> Self {
        RealMatrix { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn act(&self, z: C64) -> C64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        [self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d]
            .iter()
            .fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl From<ModularMatrix> for RealMatrix {
    fn from(m: ModularMatrix) -> Self {
        RealMatrix { a: m.a as f64, b: m.b as f64, c: m.c as f64, d: m.d as f64 }
    }
}
