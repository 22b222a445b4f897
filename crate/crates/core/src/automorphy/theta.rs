use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64 as C64;

use crate::{Error, Result};

/// Partial sum of `θ(z) = Σ e^{2πin²z}` with a bound on the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaValue {
    pub value: C64,
    pub n_max: u32,
    pub tail_bound: f64,
}

type Key = (u64, u64, u32);

fn cache() -> &'static Mutex<HashMap<Key, ThetaValue>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, ThetaValue>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn tail_bound(y: f64, n_max: u32) -> f64 {
    let n1 = n_max as f64 + 1.0;
    let q = (-2.0 * PI * y * (2.0 * n1 + 1.0)).exp();
    2.0 * (-2.0 * PI * y * n1 * n1).exp() / (1.0 - q)
}

/// `Σ_{|n| ≤ n_max} e^{2πin²z}`.
pub fn theta_series_oracle(z: C64, n_max: u32) -> Result<ThetaValue> {
    if !(z.im > 0.0) {
        return Err(Error::Domain {
            function: "theta_series_oracle",
            detail: format!("Im z = {} is not positive", z.im),
        });
    }
    let key = (z.re.to_bits(), z.im.to_bits(), n_max);
    if let Some(v) = cache().lock().expect("theta cache").get(&key) {
        return Ok(*v);
    }
    let mut s = C64::new(0.0, 0.0);
    for n in (1..=n_max as u64).rev() {
        let n2 = (n * n) as f64;
        let phase = (n2 * z.re).rem_euclid(1.0);
        s += C64::from_polar((-2.0 * PI * n2 * z.im).exp(), 2.0 * PI * phase);
    }
    let v = ThetaValue {
        value: C64::new(1.0, 0.0) + 2.0 * s,
        n_max,
        tail_bound: tail_bound(z.im, n_max),
    };
    cache().lock().expect("theta cache").entry(key).or_insert(v);
    Ok(v)
}

/// [`theta_series_oracle`] with `n_max ≥ floor`, raised until the tail bound is
/// below `tol`.
pub fn theta_series_converged(z: C64, floor: u32, tol: f64) -> Result<ThetaValue> {
    if !(z.im > 0.0) {
        return theta_series_oracle(z, floor);
    }
    let mut n = floor.max(1);
    while tail_bound(z.im, n) > tol {
        n = n.checked_mul(2).ok_or_else(|| Error::Domain {
            function: "theta_series_converged",
            detail: format!("Im z = {} too small", z.im),
        })?;
        if n > 50_000_000 {
            return Err(Error::Domain {
                function: "theta_series_converged",
                detail: format!("Im z = {} too small", z.im),
            });
        }
    }
    theta_series_oracle(z, n)
}
