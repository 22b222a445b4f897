//! Weight-l automorphy: the factor j(γ,z), the slash operator, the consistency
//! factor r(M,N), and the theta multiplier system.

mod theta;

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::arith::{kronecker, DirichletCharacter};
use crate::modgroup::{ModularMatrix, RealMatrix};
use crate::specfun::principal_arg;
use crate::{Error, Result};

pub use theta::{theta_series_converged, theta_series_oracle, ThetaValue};

/// `l mod 2`, which selects ν_θ or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WeightClass {
    Half,
    ThreeHalves,
}

/// A half-integral weight `l`, stored as the odd integer `2l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Weight {
    twice: i32,
}

impl Weight {
    pub const HALF: Weight = Weight { twice: 1 };
    pub const THREE_HALVES: Weight = Weight { twice: 3 };

    pub fn new(l: f64) -> Result<Self> {
        let t = 2.0 * l;
        if !t.is_finite() || t != t.round() || (t as i64).rem_euclid(2) != 1 || t.abs() > 1e6 {
            return Err(Error::Invalid(format!("weight {l} is not in 1/2 + Z")));
        }
        Ok(Weight { twice: t as i32 })
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn class(self) -> WeightClass {
        if self.twice.rem_euclid(4) == 1 {
            WeightClass::Half
        } else {
            WeightClass::ThreeHalves
        }
    }
}

impl TryFrom<f64> for Weight {
    type Error = Error;
    fn try_from(l: f64) -> Result<Self> {
        Weight::new(l)
    }
}

impl From<Weight> for f64 {
    fn from(w: Weight) -> f64 {
        w.value()
    }
}

/// `j(γ, z) = exp(i·l·arg(cz+d))`, a unit-modulus phase.
pub fn j_factor(g: &ModularMatrix, z: C64, l: f64) -> C64 {
    j_factor_real(&RealMatrix::from(*g), z, l)
}

/// [`j_factor`] for a real matrix of determinant one.
pub fn j_factor_real(g: &RealMatrix, z: C64, l: f64) -> C64 {
    let q = g.c * z + g.d;
    C64::from_polar(1.0, l * principal_arg(q))
}

/// Consistency factor `r(M,N) = j(MN,z) / (j(M,Nz)·j(N,z))`, so that
/// `(f|M)|N = r(M,N)·f|(MN)`. Independent of `z`.
pub fn r_direct(m: &ModularMatrix, n: &ModularMatrix, z: C64, l: f64) -> C64 {
    r_direct_real(&RealMatrix::from(*m), &RealMatrix::from(*n), z, l)
}

/// [`r_direct`] for real matrices.
pub fn r_direct_real(m: &RealMatrix, n: &RealMatrix, z: C64, l: f64) -> C64 {
    let mn = m.mul(n);
    j_factor_real(&mn, z, l) / (j_factor_real(m, n.act(z), l) * j_factor_real(n, z, l))
}

fn sgn(x: i64) -> i64 {
    x.signum()
}

/// The integer `w(M,N)` of the closed form `r(M,N) = e^{πilw/2}`, selected by
/// which of the lower-left entries of `M`, `N`, `MN` vanish.
pub fn w_closed(m: &ModularMatrix, n: &ModularMatrix) -> i64 {
    let (m1, m2) = (m.c, m.d);
    let (a, c) = (n.a, n.c);
    let m1p = m.mul(n).c;
    match (m1 != 0, c != 0, m1p != 0) {
        (true, true, true) => sgn(c) + sgn(m1) - sgn(m1p) - sgn(m1) * sgn(c) * sgn(m1p),
        (true, true, false) => (sgn(c) - 1) * (1 - sgn(m1)),
        (false, true, true) => (sgn(c) + 1) * (1 - sgn(m2)),
        (true, false, true) => (1 - sgn(a)) * (1 + sgn(m1)),
        (false, false, false) => (1 - sgn(a)) * (1 - sgn(m2)),
        // m1 = 0 and c = 0 force m1' = 0; the other patterns cannot occur.
        _ => unreachable!("impossible vanishing pattern for det-one matrices"),
    }
}

/// `r(M,N)` from [`w_closed`].
pub fn r_closed(m: &ModularMatrix, n: &ModularMatrix, l: f64) -> C64 {
    C64::from_polar(1.0, PI * l / 2.0 * w_closed(m, n) as f64)
}

/// The theta multiplier `ν_θ(γ) = (c/d)·ε` with `ε = 1` for `d ≡ 1 (4)` and
/// `ε = -i` for `d ≡ 3 (4)`, on Γ₀(4).
pub fn theta_multiplier(g: &ModularMatrix) -> Result<C64> {
    if g.c.rem_euclid(4) != 0 {
        return Err(Error::NotInGroup(format!("{g} is not in Gamma0(4)")));
    }
    let k = kronecker(g.c, g.d) as f64;
    Ok(if g.d.rem_euclid(4) == 1 {
        C64::new(k, 0.0)
    } else {
        C64::new(0.0, -k)
    })
}

/// `ν_l`: the theta multiplier for `l ≡ 1/2` and its inverse for `l ≡ 3/2`,
/// optionally multiplied by a Dirichlet character evaluated at `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierSystem {
    level: i64,
    class: WeightClass,
    character: Option<DirichletCharacter>,
}

impl MultiplierSystem {
    pub fn new(level: i64, class: WeightClass) -> Result<Self> {
        if level <= 0 || level % 4 != 0 {
            return Err(Error::Level(level));
        }
        Ok(MultiplierSystem { level, class, character: None })
    }

    /// Compose with a character whose modulus divides the level.
    pub fn with_character(mut self, chi: DirichletCharacter) -> Result<Self> {
        if self.level % chi.modulus() as i64 != 0 {
            return Err(Error::Modulus {
                modulus: chi.modulus(),
                reason: "character modulus must divide the level",
            });
        }
        self.character = Some(chi);
        Ok(self)
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn class(&self) -> WeightClass {
        self.class
    }

    pub fn eval(&self, g: &ModularMatrix) -> Result<C64> {
        if !g.in_gamma0(self.level) {
            return Err(Error::NotInGroup(format!("{g} is not in Gamma0({})", self.level)));
        }
        let t = theta_multiplier(g)?;
        let base = match self.class {
            WeightClass::Half => t,
            WeightClass::ThreeHalves => t.conj(),
        };
        Ok(match &self.character {
            Some(chi) => base * chi.eval(g.d),
            None => base,
        })
    }
}

/// Weight and multiplier for the slash operator `f|γ(z) = j(γ,z)^{-1} f(γz)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlashContext {
    pub weight: Weight,
    pub multiplier: Option<MultiplierSystem>,
}

impl SlashContext {
    pub fn new(weight: Weight, level: i64) -> Result<Self> {
        Ok(SlashContext {
            weight,
            multiplier: Some(MultiplierSystem::new(level, weight.class())?),
        })
    }

    pub fn l(&self) -> f64 {
        self.weight.value()
    }

    /// `(f|γ)(z)`.
    pub fn slash<F: Fn(C64) -> C64>(&self, f: F, g: &ModularMatrix, z: C64) -> C64 {
        f(g.act(z)) / j_factor(g, z, self.l())
    }

    /// `(f|σ)(z)` for a real matrix.
    pub fn slash_real<F: Fn(C64) -> C64>(&self, f: F, g: &RealMatrix, z: C64) -> C64 {
        f(g.act(z)) / j_factor_real(g, z, self.l())
    }

    /// `ν(γ)`, or 1 when no multiplier is attached.
    pub fn nu(&self, g: &ModularMatrix) -> Result<C64> {
        match &self.multiplier {
            Some(m) => m.eval(g),
            None => Ok(C64::new(1.0, 0.0)),
        }
    }
}
