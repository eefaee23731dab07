//! Versioned JSON run configuration.
//!
//! ```json
//! {
//!   "version": 1,
//!   "pattern": "t64.json",
//!   "catalog": {
//!     "initial": [{"kind": "gaussian", "variance": 1.0}],
//!     "noise": {"kind": "gaussian", "variance": 1.0}
//!   },
//!   "assignment": "round_robin",
//!   "algorithm": "alg",
//!   "trials": 50000,
//!   "tau_star": {"fixed": 0.0},
//!   "seed": 7
//! }
//! ```
//!
//! `pattern` is resolved relative to the config file. `assignment` may also be
//! `{"explicit": [i0, i1, ...]}` with one catalog index per sensor.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dist::{DistributionSpec, FamilyCatalog};
use crate::error::{Error, Result};
use crate::montecarlo::{ExperimentConfig, TauPolicy};
use crate::pattern::MeetingPattern;
use crate::sync::Algorithm;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum AssignmentRule {
    RoundRobin,
    Explicit(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub pattern: PathBuf,
    pub catalog: FamilyCatalog,
    #[serde(default = "default_assignment")]
    pub assignment: AssignmentRule,
    #[serde(default = "default_algorithm")]
    pub algorithm: Algorithm,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub tau_star: TauPolicy,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub anchored: Vec<usize>,
    /// Target accuracy for the convergence-time gate of `report`.
    #[serde(default)]
    pub epsilon: Option<f64>,
}

fn default_assignment() -> AssignmentRule {
    AssignmentRule::RoundRobin
}

fn default_algorithm() -> Algorithm {
    Algorithm::Alg
}

fn default_trials() -> usize {
    10_000
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: RunConfig = serde_json::from_str(text)?;
        if config.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                config.version
            )));
        }
        if config.catalog.initial.is_empty() {
            return Err(Error::Config("catalog.initial must not be empty".into()));
        }
        Ok(config)
    }

    /// Reads the config and makes the pattern path absolute.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config = Self::from_json(&text)?;
        if config.pattern.is_relative() {
            if let Some(dir) = path.parent() {
                config.pattern = dir.join(&config.pattern);
            }
        }
        if !config.pattern.exists() {
            return Err(Error::Config(format!(
                "pattern file {} does not exist",
                config.pattern.display()
            )));
        }
        Ok(config)
    }

    pub fn load_pattern(&self) -> Result<MeetingPattern> {
        MeetingPattern::load(&self.pattern)
    }

    pub fn assignment_for(&self, n: usize) -> Result<Vec<DistributionSpec>> {
        let initial = &self.catalog.initial;
        match &self.assignment {
            AssignmentRule::RoundRobin => Ok((0..n).map(|a| initial[a % initial.len()]).collect()),
            AssignmentRule::Explicit(map) => {
                if map.len() != n {
                    return Err(Error::AssignmentIncomplete { got: map.len(), n });
                }
                map.iter()
                    .map(|&i| {
                        initial
                            .get(i)
                            .copied()
                            .ok_or_else(|| Error::Config(format!("assignment refers to catalog entry {i}")))
                    })
                    .collect()
            }
        }
    }

    pub fn anchored_mask(&self, n: usize) -> Result<Vec<bool>> {
        let mut mask = vec![false; n];
        for &a in &self.anchored {
            *mask
                .get_mut(a)
                .ok_or_else(|| Error::Config(format!("anchored sensor {a} out of range for n = {n}")))? = true;
        }
        Ok(mask)
    }

    /// Builds the experiment; `fallback_seed` is used when the file has none.
    pub fn experiment(&self, pattern: MeetingPattern, fallback_seed: Option<u64>) -> Result<ExperimentConfig> {
        let seed = self
            .seed
            .or(fallback_seed)
            .ok_or_else(|| Error::Config("no seed in config and no fallback seed given".into()))?;
        let n = pattern.n();
        Ok(ExperimentConfig {
            assignment: self.assignment_for(n)?,
            anchored: self.anchored_mask(n)?,
            noise: self.catalog.noise,
            algorithm: self.algorithm,
            trials: self.trials,
            tau_star: self.tau_star,
            seed,
            workers: None,
            pattern,
        })
    }
}
