//! Command-line flags. Every flag overrides the matching config-file key.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use stvflow_core::experiments::{ConvergenceMode, ErrorMetric};
use stvflow_core::{Profile, Projection};

use crate::config::{DriftChoice, RunConfig};
use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "stvflow", version, about = "Stochastic total variation flow experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one path and write the energy trace.
    Simulate(Overrides),
    /// Sweep the sign of the discrete Laplacian pairing over random functions.
    CheckLemma(Overrides),
    /// Monte Carlo audit of the variational inequality against one test process.
    CheckSvi(Overrides),
    /// Self-convergence table over a refinement hierarchy.
    Converge(Overrides),
    /// Run the noise-free flow to stationarity and compare with the minimizer.
    Denoise(Overrides),
}

impl Command {
    pub fn overrides(&self) -> &Overrides {
        match self {
            Command::Simulate(o)
            | Command::CheckLemma(o)
            | Command::CheckSvi(o)
            | Command::Converge(o)
            | Command::Denoise(o) => o,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// `key = value` config file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of cells.
    #[arg(long = "J")]
    pub cells: Option<usize>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// Number of time steps.
    #[arg(long = "N")]
    pub steps: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub x0: Option<Profile>,
    #[arg(long)]
    pub g: Option<Profile>,
    #[arg(long)]
    pub projection: Option<Projection>,
    #[arg(long)]
    pub noise_amp: Option<f64>,
    /// Zero Brownian increments.
    #[arg(long)]
    pub deterministic: bool,
    #[arg(long)]
    pub solver_tol: Option<f64>,
    #[arg(long)]
    pub max_newton: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write every nodal value of the simulated path.
    #[arg(long)]
    pub nodes_out: Option<PathBuf>,

    /// Comma separated cell counts for the pairing sweep.
    #[arg(long = "J-list", value_delimiter = ',')]
    pub lemma_cells: Option<Vec<usize>>,
    /// Comma separated epsilons for the pairing sweep.
    #[arg(long = "epsilon-list", value_delimiter = ',')]
    pub lemma_epsilons: Option<Vec<f64>>,
    #[arg(long)]
    pub trials: Option<usize>,

    /// Initial value of the test process.
    #[arg(long)]
    pub z0: Option<Profile>,
    #[arg(long, value_enum)]
    pub drift: Option<DriftChoice>,
    /// Drift rows for `--drift file`.
    #[arg(long = "G-file")]
    pub g_file: Option<PathBuf>,
    /// Evaluation step `n` of the audit.
    #[arg(long)]
    pub step_index: Option<usize>,
    #[arg(long)]
    pub slack_c: Option<f64>,
    #[arg(long)]
    pub confidence: Option<f64>,

    #[arg(long)]
    pub mode: Option<ConvergenceMode>,
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long)]
    pub metric: Option<ErrorMetric>,
    #[arg(long)]
    pub min_rate: Option<f64>,

    #[arg(long)]
    pub stationary_tol: Option<f64>,
    #[arg(long)]
    pub max_steps: Option<usize>,

    #[arg(long)]
    pub workers: Option<usize>,
}

macro_rules! apply {
    ($src:ident, $dst:ident; $($field:ident),+ $(,)?) => {
        $(if let Some(v) = $src.$field.clone() { $dst.$field = v; })+
    };
}

macro_rules! apply_opt {
    ($src:ident, $dst:ident; $($field:ident),+ $(,)?) => {
        $(if let Some(v) = $src.$field.clone() { $dst.$field = Some(v); })+
    };
}

impl Overrides {
    /// Config file (or defaults) with the flags applied on top.
    pub fn resolve(&self) -> CliResult<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let o = self;
        apply!(o, cfg; cells, tau, steps, epsilon, lambda, seed, samples, x0, g, projection,
            noise_amp, solver_tol, max_newton, lemma_cells, lemma_epsilons, trials, z0, drift,
            slack_c, confidence, mode, levels, metric, stationary_tol, max_steps, workers);
        apply_opt!(o, cfg; out, nodes_out, g_file, step_index, min_rate);
        if o.deterministic {
            cfg.deterministic = true;
        }
        Ok(cfg)
    }
}
