//! The verification record emitted by every check.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::{Error, Result};

/// One check: what was compared, how far apart, and against which tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The mathematical statement the check exercises.
    pub paper_ref: String,
    pub inputs: Value,
    /// Non-negative; serialized as `null` when not finite.
    #[serde(deserialize_with = "nullable_f64")]
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    /// A row passing iff `residual ≤ tol` (a non-finite residual fails).
    pub fn new(name: impl Into<String>, statement: impl Into<String>, inputs: Value, residual: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            paper_ref: statement.into(),
            inputs,
            residual,
            tol,
            pass: residual.is_finite() && residual <= tol,
        }
    }
}

fn nullable_f64<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub errata: Vec<String>,
    pub assumptions: Vec<String>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn assume(&mut self, text: impl Into<String>) {
        self.assumptions.push(text.into());
    }

    pub fn erratum(&mut self, text: impl Into<String>) {
        self.errata.push(text.into());
    }

    /// Appends another report's rows, errata and assumptions (duplicates of
    /// the last two are dropped).
    pub fn merge(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
        for e in other.errata {
            if !self.errata.contains(&e) {
                self.errata.push(e);
            }
        }
        for a in other.assumptions {
            if !self.assumptions.contains(&a) {
                self.assumptions.push(a);
            }
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Dataset(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Dataset(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn pass_flag_follows_tolerance() {
        assert!(Check::new("a", "x", json!({}), 1e-7, 1e-6).pass);
        assert!(!Check::new("a", "x", json!({}), 1e-5, 1e-6).pass);
        assert!(!Check::new("a", "x", json!({}), f64::NAN, 1e-6).pass);
    }

    #[test]
    fn json_shape() {
        let mut r = VerificationReport::new();
        r.push(Check::new("cocycle", "closed form of r(M,N)", json!({"pairs": 3}), 0.0, 1e-9));
        r.assume("analytic continuation assumed");
        let v: Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        let row = &v["checks"][0];
        for key in ["name", "paper_ref", "inputs", "residual", "tol", "pass"] {
            assert!(row.get(key).is_some(), "{key}");
        }
        assert_eq!(v["assumptions"][0], "analytic continuation assumed");
        assert_eq!(VerificationReport::from_json(&r.to_json().unwrap()).unwrap(), r);
    }

    #[test]
    fn merge_keeps_rows_and_dedups_notes() {
        let mut a = VerificationReport::new();
        a.assume("x");
        let mut b = VerificationReport::new();
        b.assume("x");
        b.push(Check::new("k", "s", json!(null), 1.0, 0.5));
        a.merge(b);
        assert_eq!(a.assumptions.len(), 1);
        assert!(!a.all_pass());
    }
}
