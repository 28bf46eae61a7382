//! Self-convergence studies: Cauchy differences between consecutive levels
//! of a refinement hierarchy, all driven by one Brownian path.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::energy::EnergyParams;
use crate::error::{Error, Result};
use crate::fem::{make_mesh, FEFunction, Projection};
use crate::noise::{self, NoisePlan};
use crate::profiles::Profile;
use crate::stepper::{solve_path, PathSample, SchemeParams, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvergenceMode {
    /// Halve `h` at fixed `τ`.
    H,
    /// Halve `τ` at fixed `h`.
    Tau,
    /// Halve `ε` at fixed discretization.
    Epsilon,
    /// Halve `h` and `τ` together.
    Coupled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorMetric {
    /// `‖·‖_h` at the final time.
    #[default]
    Final,
    /// Maximum of `‖·‖_h` over the coarse time grid.
    Sup,
}

macro_rules! name_table {
    ($ty:ty, $($variant:path => $name:literal),+ $(,)?) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($variant => $name),+ })
            }
        }
        impl FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s {
                    $($name => Ok($variant),)+
                    _ => Err(format!("unknown value `{s}`")),
                }
            }
        }
    };
}

name_table!(ConvergenceMode,
    ConvergenceMode::H => "h",
    ConvergenceMode::Tau => "tau",
    ConvergenceMode::Epsilon => "epsilon",
    ConvergenceMode::Coupled => "coupled",
);
name_table!(ErrorMetric, ErrorMetric::Final => "final", ErrorMetric::Sup => "sup");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSetup {
    pub cells: usize,
    pub steps: usize,
    pub tau: f64,
    pub epsilon: f64,
    pub lambda: f64,
    pub x0: Profile,
    pub g: Profile,
    pub projection: Projection,
    pub noise_amplitude: f64,
    pub seed: u64,
    pub deterministic: bool,
    pub mode: ConvergenceMode,
    pub levels: usize,
    pub metric: ErrorMetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub level: usize,
    pub h: f64,
    pub tau: f64,
    pub epsilon: f64,
    /// Difference between this level and the next finer one.
    pub error: f64,
    /// `log2(error_{l-1} / error_l)`; absent on the first row.
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub mode: ConvergenceMode,
    pub metric: ErrorMetric,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn rates(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.rate).collect()
    }

    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }
}

struct Level {
    cells: usize,
    steps: usize,
    tau: f64,
    epsilon: f64,
}

impl ConvergenceSetup {
    fn level(&self, l: usize) -> Level {
        let k = 1usize << l;
        let (space, time, eps) = match self.mode {
            ConvergenceMode::H => (k, 1, 1),
            ConvergenceMode::Tau => (1, k, 1),
            ConvergenceMode::Epsilon => (1, 1, k),
            ConvergenceMode::Coupled => (k, k, 1),
        };
        Level {
            cells: self.cells * space,
            steps: self.steps * time,
            tau: self.tau / time as f64,
            epsilon: self.epsilon / eps as f64,
        }
    }

    fn solve_level(&self, l: usize, fine_increments: &[f64]) -> Result<PathSample> {
        let lv = self.level(l);
        let mesh = make_mesh(lv.cells)?;
        let x0 = self.x0.build(mesh.clone(), self.projection, self.noise_amplitude, self.seed);
        let g = self.g.build(mesh, self.projection, self.noise_amplitude, self.seed);
        let energy = EnergyParams::new(lv.epsilon, self.lambda, g)?;
        let p = SchemeParams::new(energy, lv.tau, lv.steps, x0, SolverOptions::default())?;
        let increments = noise::aggregate_increments(fine_increments, fine_increments.len() / lv.steps)?;
        solve_path(&p, &increments)
    }
}

/// `‖·‖_h` distance between a coarse state and the restriction of a fine one
/// to the coarse nodes.
fn restricted_distance(coarse: &FEFunction, fine: &FEFunction) -> f64 {
    let ratio = fine.mesh().cells() / coarse.mesh().cells();
    let h = coarse.mesh().h();
    let sq: f64 = coarse
        .interior()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let d = c - fine.values()[(k + 1) * ratio];
            d * d
        })
        .sum();
    (h * sq).sqrt()
}

fn path_distance(coarse: &PathSample, fine: &PathSample, metric: ErrorMetric) -> f64 {
    let n = coarse.states.len() - 1;
    let ratio = (fine.states.len() - 1) / n;
    match metric {
        ErrorMetric::Final => restricted_distance(&coarse.states[n], &fine.states[n * ratio]),
        ErrorMetric::Sup => (0..=n)
            .map(|k| restricted_distance(&coarse.states[k], &fine.states[k * ratio]))
            .fold(0.0, f64::max),
    }
}

pub fn convergence_study(setup: &ConvergenceSetup) -> Result<ConvergenceTable> {
    if setup.levels < 3 {
        return Err(Error::param("levels", "at least three levels are required"));
    }
    let finest = setup.level(setup.levels - 1);
    let increments = if setup.deterministic {
        noise::degenerate_increments(finest.steps)
    } else {
        noise::sample_increments(&NoisePlan::new(finest.steps, finest.tau, setup.seed, 0)?)
    };
    let paths: Vec<PathSample> = (0..setup.levels)
        .map(|l| setup.solve_level(l, &increments))
        .collect::<Result<_>>()?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(setup.levels - 1);
    for l in 0..setup.levels - 1 {
        let lv = setup.level(l);
        let error = path_distance(&paths[l], &paths[l + 1], setup.metric);
        let rate = rows.last().map(|prev| (prev.error / error).log2());
        rows.push(ConvergenceRow {
            level: l,
            h: 1.0 / lv.cells as f64,
            tau: lv.tau,
            epsilon: lv.epsilon,
            error,
            rate,
        });
    }
    Ok(ConvergenceTable {
        mode: setup.mode,
        metric: setup.metric,
        rows,
    })
}
