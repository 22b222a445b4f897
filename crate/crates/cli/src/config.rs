use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use metaplex::automorphy::Weight;
use metaplex::converse::ValidationOptions;
use metaplex::eisenstein::{EisensteinConfig, SpectralContext};
use metaplex::C64;
use serde::{Deserialize, Serialize};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "METAPLEX_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub cocycle: f64,
    pub theta: f64,
    pub gauss: f64,
    pub automorphy: f64,
    pub laplacian: f64,
    pub two_route: f64,
    pub fricke: f64,
    pub contour: f64,
    pub fit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            cocycle: 1e-9,
            theta: 1e-8,
            gauss: 1e-12,
            automorphy: 1e-5,
            laplacian: 1e-4,
            two_route: 1e-6,
            fricke: 1e-5,
            contour: 1e-4,
            fit: 1e-4,
        }
    }
}

/// Everything a run depends on. Read from a TOML file, then overridden by
/// command-line flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub level: i64,
    /// `"1/2"` or `"3/2"`.
    pub weight: String,
    pub w: [f64; 2],
    pub c_max: f64,
    pub n_max: usize,
    pub heights: Vec<f64>,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    pub csv: bool,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub validation: ValidationOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        let e = EisensteinConfig::default();
        RunConfig {
            level: 4,
            weight: "1/2".into(),
            w: [2.5, 0.0],
            c_max: e.c_max,
            n_max: e.n_max,
            heights: e.heights,
            threads: None,
            output: None,
            csv: false,
            seed: 1,
            tolerances: Tolerances::default(),
            validation: ValidationOptions::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn weight(&self) -> anyhow::Result<Weight> {
        match self.weight.trim() {
            "1/2" => Ok(Weight::HALF),
            "3/2" => Ok(Weight::THREE_HALVES),
            other => bail!("weight must be \"1/2\" or \"3/2\", got {other:?}"),
        }
    }

    pub fn w(&self) -> C64 {
        C64::new(self.w[0], self.w[1])
    }

    pub fn eisenstein(&self) -> EisensteinConfig {
        EisensteinConfig {
            c_max: self.c_max,
            n_max: self.n_max,
            heights: self.heights.clone(),
            ..EisensteinConfig::default()
        }
    }

    pub fn context(&self) -> anyhow::Result<SpectralContext> {
        Ok(SpectralContext::new(self.level, self.weight()?, self.w())?)
    }

    /// Flag value, then config value, then the environment variable.
    pub fn thread_count(&self) -> anyhow::Result<Option<usize>> {
        if let Some(n) = self.threads {
            return Ok(Some(n));
        }
        match std::env::var(THREADS_ENV) {
            Ok(v) => {
                let n = v
                    .trim()
                    .parse::<usize>()
                    .with_context(|| format!("{THREADS_ENV}={v:?} is not a thread count"))?;
                Ok(Some(n))
            }
            Err(_) => Ok(None),
        }
    }
}

/// Parses `"re,im"` or `"re"`.
pub fn parse_complex(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok([num(re)?, 0.0]),
        [re, im] => Ok([num(re)?, num(im)?]),
        _ => Err(format!("expected \"re,im\", got {s:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_and_unknown_keys() {
        let c = RunConfig { level: 8, seed: 7, ..Default::default() };
        let text = toml::to_string(&c).unwrap();
        assert_eq!(toml::from_str::<RunConfig>(&text).unwrap(), c);
        assert!(toml::from_str::<RunConfig>("levle = 4").is_err());
        let partial: RunConfig = toml::from_str("n_max = 6\n[tolerances]\nfit = 1e-3\n").unwrap();
        assert_eq!(partial.n_max, 6);
        assert_eq!(partial.tolerances.fit, 1e-3);
        assert_eq!(partial.tolerances.cocycle, 1e-9);
    }

    #[test]
    fn weight_labels() {
        let mut c = RunConfig::default();
        assert_eq!(c.weight().unwrap(), Weight::HALF);
        c.weight = "3/2".into();
        assert_eq!(c.weight().unwrap(), Weight::THREE_HALVES);
        c.weight = "1".into();
        assert!(c.weight().is_err());
    }

    #[test]
    fn complex_flags() {
        assert_eq!(parse_complex("2.5").unwrap(), [2.5, 0.0]);
        assert_eq!(parse_complex("0.1, -2").unwrap(), [0.1, -2.0]);
        assert!(parse_complex("1,2,3").is_err());
        assert!(parse_complex("x").is_err());
    }
}
