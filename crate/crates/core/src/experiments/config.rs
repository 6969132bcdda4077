use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gibbs::{DEFAULT_SPECTRUM_LIMIT, DEFAULT_THRESHOLD};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    Satisfiability,
    Gibbs,
}

/// Either an explicit list or an inclusive `start..=stop` grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Densities {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl Densities {
    /// Grid points, rounded to 1e-9 so that `0.1 * 3` prints as `0.3`.
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            Densities::List(v) => Ok(v.clone()),
            &Densities::Range { start, stop, step } => {
                if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
                    return Err(Error::Config(format!(
                        "density range needs finite start <= stop and step > 0 (got {start}, {stop}, {step})"
                    )));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
                Ok((0..n)
                    .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
                    .collect())
            }
        }
    }
}

fn default_betas() -> Vec<f64> {
    vec![1.0, 2.0, 3.0]
}

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

fn default_limit() -> usize {
    DEFAULT_SPECTRUM_LIMIT
}

fn default_name() -> String {
    "sweep".to_string()
}

/// Sweep description, read from JSON.
///
/// ```json
/// {
///   "name": "fig2_gibbs_n16",
///   "mode": "gibbs",
///   "k": 2,
///   "n_vars": 16,
///   "densities": {"start": 0.25, "stop": 3.0, "step": 0.25},
///   "instances_per_density": 200,
///   "betas": [1, 2, 3],
///   "threshold": 0.9,
///   "master_seed": 2026
/// }
/// ```
///
/// `name` (default `"sweep"`) names the output files. `betas` (default
/// `[1, 2, 3]`), `threshold` (default 0.9) and `exhaustive_limit` (default 24)
/// only matter in gibbs mode. Unknown fields are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub mode: SweepMode,
    pub k: usize,
    pub n_vars: usize,
    pub densities: Densities,
    pub instances_per_density: usize,
    #[serde(default = "default_betas")]
    pub betas: Vec<f64>,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    pub master_seed: u64,
    #[serde(default = "default_limit")]
    pub exhaustive_limit: usize,
}

impl SweepConfig {
    pub fn new(mode: SweepMode, k: usize, n_vars: usize, densities: Vec<f64>, instances: usize, seed: u64) -> Self {
        SweepConfig {
            name: default_name(),
            mode,
            k,
            n_vars,
            densities: Densities::List(densities),
            instances_per_density: instances,
            betas: default_betas(),
            threshold: default_threshold(),
            master_seed: seed,
            exhaustive_limit: default_limit(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SweepConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || "_-.".contains(c))
        {
            return fail(format!("name {:?} must be non-empty [A-Za-z0-9_.-]", self.name));
        }
        if !(2..=3).contains(&self.k) {
            return fail(format!("k must be 2 or 3, got {}", self.k));
        }
        if self.n_vars <= self.k {
            return fail(format!("n_vars must exceed k, got {}", self.n_vars));
        }
        let alphas = self.densities.values()?;
        if alphas.is_empty() {
            return fail("densities must not be empty".into());
        }
        if alphas.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return fail("densities must be finite and non-negative".into());
        }
        if alphas.windows(2).any(|w| w[0] >= w[1]) {
            return fail("densities must be strictly increasing".into());
        }
        if self.instances_per_density == 0 {
            return fail("instances_per_density must be at least 1".into());
        }
        if self.betas.iter().any(|b| !b.is_finite() || *b < 0.0) {
            return fail("betas must be finite and non-negative".into());
        }
        if self.betas.windows(2).any(|w| w[0] >= w[1]) {
            return fail("betas must be strictly increasing".into());
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return fail(format!("threshold must lie in (0, 1), got {}", self.threshold));
        }
        if self.mode == SweepMode::Gibbs && self.n_vars > self.exhaustive_limit.min(40) {
            return Err(Error::TooLarge {
                n_vars: self.n_vars,
                limit: self.exhaustive_limit.min(40),
            });
        }
        Ok(())
    }

    /// Expanded density grid.
    pub fn alphas(&self) -> Result<Vec<f64>> {
        self.densities.values()
    }

    /// `M = round(α N)`.
    pub fn clause_count(&self, alpha: f64) -> usize {
        (alpha * self.n_vars as f64).round() as usize
    }

    /// SHA-256 of the canonical JSON form; identifies checkpoints.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&canonical)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
