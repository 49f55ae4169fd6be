//! Experiment configuration: a single JSON document holding the mixture,
//! the kernel list, solver settings, and Monte-Carlo settings.

use crate::kernels::KernelSpec;
use crate::synth::MixtureConfig;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Solver mode selector as it appears in configs and on the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SolveMode {
    Hard,
    Slack,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mixture: MixtureConfig,
    pub kernels: Vec<KernelSpec>,
    /// 1-based kernel order used for the prefix sums.
    pub permutation: Vec<usize>,
    pub mode: SolveMode,
    /// Slack parameter; must be 0.5 whenever bound checks run in slack mode.
    pub c: f64,
    pub b_squared: f64,
    pub tol: f64,
    pub max_sweeps: usize,
    pub mc_samples: usize,
    pub mc_seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_file<P: AsRef<Path>>(path: P) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|source| ConfigError::Parse { path: path.to_path_buf(), source })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.mixture
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.kernels.is_empty() {
            return Err(ConfigError::Invalid("kernel list is empty".into()));
        }
        for (i, spec) in self.kernels.iter().enumerate() {
            spec.validate()
                .map_err(|e| ConfigError::Invalid(format!("kernel {}: {e}", i + 1)))?;
        }
        let m = self.kernels.len();
        if self.permutation.len() != m {
            return Err(ConfigError::Invalid(format!(
                "permutation has {} entries for {m} kernels",
                self.permutation.len()
            )));
        }
        let mut seen = vec![false; m];
        for &p in &self.permutation {
            if p < 1 || p > m || seen[p - 1] {
                return Err(ConfigError::Invalid(format!(
                    "permutation must be a permutation of 1..={m}"
                )));
            }
            seen[p - 1] = true;
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(ConfigError::Invalid(format!("C must be positive, got {}", self.c)));
        }
        // Bound curves are always checked against the solve results, so
        // slack runs are pinned to the supported C.
        if self.mode == SolveMode::Slack && self.c != 0.5 {
            return Err(ConfigError::Invalid(format!(
                "slack mode with bound checks requires C = 0.5, got {}",
                self.c
            )));
        }
        if !(self.b_squared.is_finite() && self.b_squared > 0.0) {
            return Err(ConfigError::Invalid(format!(
                "B^2 must be positive, got {}",
                self.b_squared
            )));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(ConfigError::Invalid(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_sweeps == 0 {
            return Err(ConfigError::Invalid("max_sweeps must be >= 1".into()));
        }
        if self.mc_samples == 0 {
            return Err(ConfigError::Invalid("mc_samples must be >= 1".into()));
        }
        Ok(())
    }

    /// Kernels in permutation order.
    pub fn permuted_kernels(&self) -> Vec<KernelSpec> {
        self.permutation.iter().map(|&p| self.kernels[p - 1].clone()).collect()
    }
}
