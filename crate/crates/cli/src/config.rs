use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use birwalk_core::maps::GeneratorJson;
use birwalk_core::walk::{ArithMode, DEFAULT_WALK_TOLERANCE};
use serde::{Deserialize, Serialize};

/// Where the generator tuple comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    /// Sampled with a seeded ChaCha8 stream and certified.
    Sample { r: usize, height: i64, seed: u64 },
    /// Explicit matrices.
    Explicit { generators: Vec<GeneratorJson> },
    /// A `generators.json` written by `sample`.
    File { path: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Caps {
    pub exact_len: usize,
    pub float_steps: usize,
    pub degree_cap: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { exact_len: 16, float_steps: 5000, degree_cap: birwalk_core::maps::DEFAULT_DEGREE_CAP }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EquidistConfig {
    pub curve: String,
    pub max_len: usize,
    pub limit_extra: usize,
}

impl Default for EquidistConfig {
    fn default() -> Self {
        EquidistConfig { curve: "3*x - 7*y + 11*z".into(), max_len: 6, limit_extra: 6 }
    }
}

/// Everything a run depends on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub generators: GeneratorSpec,
    pub mode: ArithMode,
    pub steps: usize,
    pub checkpoint_every: usize,
    pub caps: Caps,
    pub tolerance: f64,
    pub trials: usize,
    /// Seed of trial `i` is `seeds[i]` when given, else `seed + i`.
    pub seed: u64,
    pub seeds: Option<Vec<u64>>,
    /// Word length of the genericity certificate.
    pub certificate_len: usize,
    /// Word length of `crosscheck` and of the per-trial degree check.
    pub max_len: usize,
    pub sampling_retries: usize,
    pub equidist: EquidistConfig,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            generators: GeneratorSpec::Sample { r: 2, height: 5, seed: 1 },
            mode: ArithMode::Exact,
            steps: 10,
            checkpoint_every: 1,
            caps: Caps::default(),
            tolerance: DEFAULT_WALK_TOLERANCE,
            trials: 1,
            seed: 1,
            seeds: None,
            certificate_len: 4,
            max_len: 4,
            sampling_retries: 20,
            equidist: EquidistConfig::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn trial_seeds(&self) -> Vec<u64> {
        match &self.seeds {
            Some(s) => s.iter().copied().take(self.trials).collect(),
            None => (0..self.trials as u64).map(|i| self.seed.wrapping_add(i)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), c);
        let partial: RunConfig = serde_json::from_str(r#"{"mode": "float", "steps": 50}"#).unwrap();
        assert_eq!(partial.mode, ArithMode::Float);
        assert_eq!(partial.trials, 1);
        assert!(serde_json::from_str::<RunConfig>(r#"{"stpes": 5}"#).is_err());
    }

    #[test]
    fn seeds() {
        let c = RunConfig { trials: 3, seed: 10, ..Default::default() };
        assert_eq!(c.trial_seeds(), vec![10, 11, 12]);
        let c = RunConfig { trials: 2, seeds: Some(vec![5, 9, 7]), ..Default::default() };
        assert_eq!(c.trial_seeds(), vec![5, 9]);
    }
}
