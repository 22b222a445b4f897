use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{divisors, factorize, gcd};
use crate::{Error, Result, C64};

/// An exact root of unity `e^{2πi·num/den}`, stored reduced with `0 <= num < den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Turn {
    num: u64,
    den: u64,
}

impl Turn {
    pub const ZERO: Turn = Turn { num: 0, den: 1 };
    pub const HALF: Turn = Turn { num: 1, den: 2 };

    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0, "turn denominator must be positive");
        let n = num.rem_euclid(den as i64) as u64;
        let g = gcd(n as i64, den as i64).max(1) as u64;
        Turn { num: n / g, den: den / g }
    }

    pub fn numerator(self) -> u64 {
        self.num
    }

    pub fn denominator(self) -> u64 {
        self.den
    }

    pub fn add(self, other: Turn) -> Turn {
        let den = lcm(self.den, other.den);
        let num = self.num * (den / self.den) + other.num * (den / other.den);
        Turn::new(num as i64, den)
    }

    pub fn conj(self) -> Turn {
        Turn::new(-(self.num as i64), self.den)
    }

    pub fn to_complex(self) -> C64 {
        match (self.num, self.den) {
            (0, _) => C64::new(1.0, 0.0),
            (1, 2) => C64::new(-1.0, 0.0),
            (1, 4) => C64::new(0.0, 1.0),
            (3, 4) => C64::new(0.0, -1.0),
            (n, d) => C64::from_polar(1.0, TAU * n as f64 / d as f64),
        }
    }
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a as i64, b as i64) as u64 * b
}

/// A Dirichlet character modulo `D`, stored as an exact value table on the
/// units of `ℤ/Dℤ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DirichletCharacter {
    modulus: u64,
    values: Vec<Option<Turn>>,
    conductor: u64,
}

impl DirichletCharacter {
    /// Builds a character from a full table (index = residue). Checks that the
    /// table is supported exactly on the units and is multiplicative.
    pub fn from_table(modulus: u64, values: Vec<Option<Turn>>) -> Result<Self> {
        if modulus == 0 || values.len() as u64 != modulus {
            return Err(Error::Invalid(format!(
                "character table of length {} for modulus {modulus}",
                values.len()
            )));
        }
        for (r, v) in values.iter().enumerate() {
            let unit = modulus == 1 || gcd(r as i64, modulus as i64) == 1;
            if unit != v.is_some() {
                return Err(Error::Invalid(format!(
                    "character value at residue {r} mod {modulus} must be {}",
                    if unit { "present" } else { "absent" }
                )));
            }
        }
        if values[(1 % modulus) as usize] != Some(Turn::ZERO) {
            return Err(Error::Invalid("χ(1) must equal 1".into()));
        }
        for a in 0..modulus {
            for b in a..modulus {
                if let (Some(x), Some(y)) = (values[a as usize], values[b as usize]) {
                    let ab = (a * b % modulus) as usize;
                    if values[ab] != Some(x.add(y)) {
                        return Err(Error::Invalid(format!(
                            "table is not multiplicative at ({a}, {b}) mod {modulus}"
                        )));
                    }
                }
            }
        }
        let conductor = compute_conductor(modulus, &values);
        Ok(DirichletCharacter { modulus, values, conductor })
    }

    pub fn principal(modulus: u64) -> Self {
        let values = (0..modulus)
            .map(|r| (modulus == 1 || gcd(r as i64, modulus as i64) == 1).then_some(Turn::ZERO))
            .collect();
        DirichletCharacter { modulus, values, conductor: 1 }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_principal(&self) -> bool {
        self.values.iter().flatten().all(|t| *t == Turn::ZERO)
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().flatten().all(|t| t.den <= 2)
    }

    /// Exact value at `m`, or `None` when `gcd(m, D) > 1`.
    pub fn value(&self, m: i64) -> Option<Turn> {
        self.values[m.rem_euclid(self.modulus as i64) as usize]
    }

    /// `χ(m)` as a complex number (0 off the units).
    pub fn eval(&self, m: i64) -> C64 {
        self.value(m).map_or(C64::new(0.0, 0.0), Turn::to_complex)
    }

    /// Iterator over `(residue, value)` for the units `0 <= r < D`.
    pub fn units(&self) -> impl Iterator<Item = (u64, Turn)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(r, v)| v.map(|t| (r as u64, t)))
    }

    pub fn product(&self, other: &DirichletCharacter) -> Result<DirichletCharacter> {
        if self.modulus != other.modulus {
            return Err(Error::Invalid("characters have different moduli".into()));
        }
        self.map_values(|r, t| t.add(other.values[r as usize].expect("same unit set")))
    }

    pub fn conj(&self) -> DirichletCharacter {
        self.map_values(|_, t| t.conj()).expect("conjugate of a character is a character")
    }

    pub(crate) fn map_values(&self, f: impl Fn(u64, Turn) -> Turn) -> Result<DirichletCharacter> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(r, v)| v.map(|t| f(r as u64, t)))
            .collect();
        DirichletCharacter::from_table(self.modulus, values)
    }
}

fn compute_conductor(modulus: u64, values: &[Option<Turn>]) -> u64 {
    for d in divisors(modulus) {
        let trivial = values.iter().enumerate().all(|(r, v)| match v {
            Some(t) => (r as u64) % d != 1 % d || *t == Turn::ZERO,
            None => true,
        });
        if trivial {
            return d;
        }
    }
    modulus
}

/// One cyclic factor of the unit group: generator residue and its order.
struct CyclicFactor {
    generator: u64,
    order: u64,
}

fn cyclic_factors(p: u64, k: u32) -> Vec<CyclicFactor> {
    let q = p.pow(k);
    if p == 2 {
        return match k {
            1 => vec![],
            2 => vec![CyclicFactor { generator: 3, order: 2 }],
            _ => vec![
                CyclicFactor { generator: q - 1, order: 2 },
                CyclicFactor { generator: 5, order: q / 4 },
            ],
        };
    }
    let order = q / p * (p - 1);
    let g = (2..q)
        .find(|&g| gcd(g as i64, p as i64) == 1 && multiplicative_order(g, q) == order)
        .expect("odd prime powers have primitive roots");
    vec![CyclicFactor { generator: g, order }]
}

fn multiplicative_order(g: u64, q: u64) -> u64 {
    let mut x = g % q;
    let mut k = 1;
    while x != 1 % q {
        x = x * g % q;
        k += 1;
    }
    k
}

/// All `φ(D)` Dirichlet characters modulo `D`, principal character first.
///
/// Tables come from the factorisation of `D` with one generator per cyclic
/// factor of each prime-power unit group, glued by the Chinese remainder
/// theorem.
pub fn enumerate_characters(modulus: u64) -> Vec<DirichletCharacter> {
    assert!(modulus >= 1, "modulus must be positive");
    if modulus == 1 {
        return vec![DirichletCharacter::principal(1)];
    }
    // Global generators (lifted through CRT) and their orders.
    let mut gens: Vec<(u64, u64)> = Vec::new();
    for (p, k) in factorize(modulus) {
        let q = p.pow(k);
        let rest = modulus / q;
        for f in cyclic_factors(p, k) {
            gens.push((crt_lift(f.generator, q, 1, rest), f.order));
        }
    }
    // Discrete logs of every unit with respect to the generators.
    let mut logs: Vec<Option<Vec<u64>>> = vec![None; modulus as usize];
    let mut exps = vec![0u64; gens.len()];
    loop {
        let r = gens
            .iter()
            .zip(&exps)
            .fold(1 % modulus, |acc, (&(g, _), &e)| acc * pow_mod(g, e, modulus) % modulus);
        logs[r as usize] = Some(exps.clone());
        if !odometer(&mut exps, gens.iter().map(|g| g.1)) {
            break;
        }
    }
    let exponent = gens.iter().fold(1, |acc, g| lcm(acc, g.1));
    let mut out = Vec::new();
    let mut choice = vec![0u64; gens.len()];
    loop {
        let values = logs
            .iter()
            .map(|l| {
                l.as_ref().map(|l| {
                    let num: u64 = l
                        .iter()
                        .zip(&choice)
                        .zip(&gens)
                        .map(|((&li, &ci), &(_, ord))| li * ci % ord * (exponent / ord))
                        .sum();
                    Turn::new((num % exponent) as i64, exponent)
                })
            })
            .collect::<Vec<_>>();
        let conductor = compute_conductor(modulus, &values);
        out.push(DirichletCharacter { modulus, values, conductor });
        if !odometer(&mut choice, gens.iter().map(|g| g.1)) {
            break;
        }
    }
    out
}

fn odometer(digits: &mut [u64], radices: impl Iterator<Item = u64>) -> bool {
    for (d, r) in digits.iter_mut().zip(radices) {
        *d += 1;
        if *d < r {
            return true;
        }
        *d = 0;
    }
    false
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// `x ≡ a (mod m)`, `x ≡ b (mod n)` with coprime `m, n`.
fn crt_lift(a: u64, m: u64, b: u64, n: u64) -> u64 {
    if n == 1 {
        return a % m;
    }
    let (_, s, _) = super::ext_gcd(m as i64, n as i64);
    // x = a + m * ((b - a) * s mod n)
    let mn = (m * n) as i128;
    let k = ((b as i128 - a as i128) * s as i128).rem_euclid(n as i128);
    ((a as i128 + m as i128 * k).rem_euclid(mn)) as u64
}

#[derive(Serialize, Deserialize)]
struct CharacterJson {
    modulus: u64,
    values: Vec<(u64, u64, u64)>,
}

impl Serialize for DirichletCharacter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CharacterJson {
            modulus: self.modulus,
            values: self.units().map(|(r, t)| (r, t.num, t.den)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DirichletCharacter {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = CharacterJson::deserialize(d)?;
        if raw.modulus == 0 {
            return Err(serde::de::Error::custom("modulus must be positive"));
        }
        let mut table = vec![None; raw.modulus as usize];
        for (r, num, den) in raw.values {
            if r >= raw.modulus || den == 0 {
                return Err(serde::de::Error::custom(format!("bad entry for residue {r}")));
            }
            table[r as usize] = Some(Turn::new(num as i64, den));
        }
        DirichletCharacter::from_table(raw.modulus, table).map_err(serde::de::Error::custom)
    }
}
