//! Run configuration: defaults, `key = value` config files and validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use stvflow_core::experiments::{ConvergenceMode, ErrorMetric};
use stvflow_core::{Profile, Projection};

use crate::error::{CliError, CliResult};

/// Drift of the SVI test process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DriftChoice {
    #[default]
    Zero,
    /// `G ≡ z0` on every interval.
    Z0,
    /// One row of nodal values per time interval, read from `g_file`.
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub cells: usize,
    pub tau: f64,
    pub steps: usize,
    pub epsilon: f64,
    pub lambda: f64,
    pub seed: u64,
    pub samples: usize,
    pub x0: Profile,
    pub g: Profile,
    pub projection: Projection,
    pub noise_amp: f64,
    /// Zero Brownian increments.
    pub deterministic: bool,
    pub solver_tol: f64,
    pub max_newton: usize,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Per-step nodal values of the simulated path.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes_out: Option<PathBuf>,

    pub lemma_cells: Vec<usize>,
    pub lemma_epsilons: Vec<f64>,
    pub trials: usize,

    pub z0: Profile,
    pub drift: DriftChoice,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_file: Option<PathBuf>,
    /// SVI evaluation index `n`; defaults to `steps`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step_index: Option<usize>,
    pub slack_c: f64,
    pub confidence: f64,

    pub mode: ConvergenceMode,
    pub levels: usize,
    pub metric: ErrorMetric,
    /// Fail when any observed rate falls below this value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_rate: Option<f64>,

    pub stationary_tol: f64,
    pub max_steps: usize,

    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            cells: 32,
            tau: 1.0 / 64.0,
            steps: 64,
            epsilon: 0.1,
            lambda: 0.0,
            seed: 0,
            samples: 1000,
            x0: Profile::Step,
            g: Profile::Zero,
            projection: Projection::Lumped,
            noise_amp: 0.1,
            deterministic: false,
            solver_tol: 1e-10,
            max_newton: 100,
            out: None,
            nodes_out: None,
            lemma_cells: (1..=9).map(|k| 1 << k).collect(),
            lemma_epsilons: vec![1.0, 0.1, 0.01, 1e-4],
            trials: 10_000,
            z0: Profile::Zero,
            drift: DriftChoice::Zero,
            g_file: None,
            step_index: None,
            slack_c: 1.0,
            confidence: 0.99,
            mode: ConvergenceMode::Tau,
            levels: 5,
            metric: ErrorMetric::Final,
            min_rate: None,
            stationary_tol: 1e-8,
            max_steps: 100_000,
            workers: 1,
        }
    }
}

fn check(ok: bool, key: &'static str, reason: &str) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{key}: {reason}")))
    }
}

fn unit_epsilon(e: f64) -> bool {
    e > 0.0 && e <= 1.0
}

impl RunConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// The resolved configuration as embedded in output files. Output paths
    /// and the worker count are left out: neither changes any result.
    pub fn echo(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = v.as_object_mut() {
            for key in ["out", "nodes_out", "workers"] {
                map.remove(key);
            }
        }
        v
    }

    /// Checks shared by every command.
    pub fn validate(&self) -> CliResult<()> {
        check(self.cells >= 2, "cells", "need at least 2 cells")?;
        check(self.tau > 0.0 && self.tau.is_finite(), "tau", "must be positive")?;
        check(self.steps >= 1, "steps", "need at least one step")?;
        check(unit_epsilon(self.epsilon), "epsilon", "must lie in (0, 1]")?;
        check(self.lambda >= 0.0 && self.lambda.is_finite(), "lambda", "must be >= 0")?;
        check(self.noise_amp >= 0.0 && self.noise_amp.is_finite(), "noise_amp", "must be >= 0")?;
        check(self.solver_tol > 0.0 && self.solver_tol.is_finite(), "solver_tol", "must be positive")?;
        check(self.max_newton >= 1, "max_newton", "must be positive")?;
        check(self.workers >= 1, "workers", "must be positive")?;
        Ok(())
    }

    pub fn validate_lemma(&self) -> CliResult<()> {
        check(self.trials >= 1, "trials", "at least one trial is required")?;
        check(!self.lemma_cells.is_empty(), "lemma_cells", "empty list")?;
        check(self.lemma_cells.iter().all(|&j| j >= 2), "lemma_cells", "need at least 2 cells")?;
        check(!self.lemma_epsilons.is_empty(), "lemma_epsilons", "empty list")?;
        check(
            self.lemma_epsilons.iter().all(|&e| unit_epsilon(e)),
            "lemma_epsilons",
            "every value must lie in (0, 1]",
        )?;
        check(self.workers >= 1, "workers", "must be positive")
    }

    pub fn validate_svi(&self) -> CliResult<()> {
        self.validate()?;
        check(self.samples >= 2, "samples", "need at least two samples for a standard error")?;
        check(self.slack_c >= 0.0 && self.slack_c.is_finite(), "slack_c", "must be >= 0")?;
        check(
            self.confidence > 0.5 && self.confidence < 1.0,
            "confidence",
            "must lie in (0.5, 1)",
        )?;
        if let Some(n) = self.step_index {
            check(n <= self.steps, "step_index", "exceeds the number of steps")?;
        }
        check(
            (self.drift == DriftChoice::File) == self.g_file.is_some(),
            "g_file",
            "required exactly when drift = file",
        )
    }

    pub fn validate_converge(&self) -> CliResult<()> {
        self.validate()?;
        check(self.levels >= 3, "levels", "at least three levels are required")?;
        check(self.levels <= 16, "levels", "at most 16 levels")
    }

    pub fn validate_denoise(&self) -> CliResult<()> {
        self.validate()?;
        check(self.lambda > 0.0, "lambda", "denoising needs lambda > 0")?;
        check(self.stationary_tol > 0.0, "stationary_tol", "must be positive")?;
        check(self.max_steps >= 1, "max_steps", "must be positive")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn optional_fields_round_trip() {
        let c = RunConfig {
            out: Some("a.csv".into()),
            step_index: Some(3),
            min_rate: Some(0.9),
            drift: DriftChoice::File,
            g_file: Some("g.csv".into()),
            epsilon: 0.1 + 0.2,
            ..RunConfig::default()
        };
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let c = RunConfig::from_toml("cells = 8\nx0 = \"noisy-step\"\nmode = \"coupled\"\n").unwrap();
        assert_eq!(c.cells, 8);
        assert_eq!(c.x0, Profile::NoisyStep);
        assert_eq!(c.mode, ConvergenceMode::Coupled);
        assert_eq!(c.steps, RunConfig::default().steps);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("cels = 8\n").is_err());
    }

    #[test]
    fn echo_drops_paths_and_workers() {
        let c = RunConfig {
            out: Some("x".into()),
            workers: 8,
            ..RunConfig::default()
        };
        let e = c.echo();
        assert!(e.get("out").is_none() && e.get("workers").is_none());
        assert_eq!(e["cells"], 32);
    }

    #[test]
    fn validation() {
        let ok = RunConfig::default();
        assert!(ok.validate().is_ok());
        assert!(RunConfig { epsilon: 0.0, ..ok.clone() }.validate().is_err());
        assert!(RunConfig { epsilon: 1.5, ..ok.clone() }.validate().is_err());
        assert!(RunConfig { cells: 1, ..ok.clone() }.validate().is_err());
        assert!(RunConfig { trials: 0, ..ok.clone() }.validate_lemma().is_err());
        assert!(RunConfig { levels: 2, ..ok.clone() }.validate_converge().is_err());
        assert!(ok.validate_denoise().is_err());
        assert!(RunConfig { step_index: Some(65), ..ok.clone() }.validate_svi().is_err());
        assert!(RunConfig { drift: DriftChoice::File, ..ok }.validate_svi().is_err());
    }
}
