//! Monte Carlo audit of the stochastic variational inequality.
//!
//! For a test process `dZ = −G dt + Z dW` driven by the same Brownian path as
//! the scheme, the inequality
//!
//! ```text
//! ½E‖X(t)−Z(t)‖² + E∫J̄(X) ≤ ½E‖x₀−Z(0)‖² + E∫J̄(Z) + ½E∫‖X−Z‖² + E∫⟨X−Z,G⟩
//! ```
//!
//! is evaluated term by term with left-endpoint quadrature in time and the
//! lumped inner product in space. A finite family of test processes can only
//! check a necessary condition.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::energy_bar;
use crate::error::{Error, Result};
use crate::fem::{lumped_inner, lumped_norm_sq, same_mesh, FEFunction};
use crate::noise::{self, NoisePlan};
use crate::stats::Estimate;
use crate::stepper::{solve_path, PathSample, SchemeParams};

pub const LIMITATION: &str = "the inequality must hold for every admissible test process; \
     a finite test family checks a necessary condition only";

/// Drift `G` of the test process, one value per time interval.
#[derive(Debug, Clone)]
pub enum Drift {
    Zero,
    Constant(FEFunction),
    /// `G[i]` acts on the interval `(t_i, t_{i+1}]`.
    Sequence(Vec<FEFunction>),
}

#[derive(Debug, Clone)]
pub struct TestProcessSpec {
    pub z0: FEFunction,
    pub drift: Drift,
}

impl TestProcessSpec {
    pub fn new(z0: FEFunction, drift: Drift) -> Result<Self> {
        if !z0.is_dirichlet() {
            return Err(Error::NotDirichlet);
        }
        let check = |g: &FEFunction| -> Result<()> {
            same_mesh(g, &z0)?;
            if g.is_dirichlet() {
                Ok(())
            } else {
                Err(Error::NotDirichlet)
            }
        };
        match &drift {
            Drift::Zero => {}
            Drift::Constant(g) => check(g)?,
            Drift::Sequence(gs) => gs.iter().try_for_each(check)?,
        }
        Ok(Self { z0, drift })
    }

    fn check_len(&self, steps: usize) -> Result<()> {
        match &self.drift {
            Drift::Sequence(gs) if gs.len() != steps => Err(Error::LengthMismatch {
                expected: steps,
                found: gs.len(),
            }),
            _ => Ok(()),
        }
    }

    fn drift_at(&self, i: usize) -> Option<&FEFunction> {
        match &self.drift {
            Drift::Zero => None,
            Drift::Constant(g) => Some(g),
            Drift::Sequence(gs) => Some(&gs[i]),
        }
    }
}

/// Test process iterates together with the fingerprint of the increments
/// that drove them.
#[derive(Debug, Clone)]
pub struct TestPath {
    pub states: Vec<FEFunction>,
    pub noise_checksum: u64,
}

/// `Z^{i+1} = Z^i − τ G[i] + Z^i ΔW_{i+1}`, nodewise.
pub fn roll_test_process(spec: &TestProcessSpec, increments: &[f64], tau: f64) -> Result<TestPath> {
    spec.check_len(increments.len())?;
    let mut states = Vec::with_capacity(increments.len() + 1);
    states.push(spec.z0.clone());
    for (i, &dw) in increments.iter().enumerate() {
        let z = &states[i];
        let next = match spec.drift_at(i) {
            None => z.scaled(1.0 + dw),
            Some(g) => z.axpby(1.0 + dw, g, -tau)?,
        };
        states.push(next);
    }
    Ok(TestPath {
        states,
        noise_checksum: noise::checksum(increments),
    })
}

/// Every term of the inequality for one sample (or their means).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SviTerms {
    pub lhs_dist: f64,
    pub lhs_energy: f64,
    pub rhs_init: f64,
    pub rhs_energy: f64,
    pub rhs_dist_int: f64,
    pub rhs_cross: f64,
    pub gap: f64,
}

impl SviTerms {
    pub fn compose(
        lhs_dist: f64,
        lhs_energy: f64,
        rhs_init: f64,
        rhs_energy: f64,
        rhs_dist_int: f64,
        rhs_cross: f64,
    ) -> Self {
        Self {
            lhs_dist,
            lhs_energy,
            rhs_init,
            rhs_energy,
            rhs_dist_int,
            rhs_cross,
            gap: (rhs_init + rhs_energy + rhs_dist_int + rhs_cross) - (lhs_dist + lhs_energy),
        }
    }

    fn as_array(&self) -> [f64; 7] {
        [
            self.lhs_dist,
            self.lhs_energy,
            self.rhs_init,
            self.rhs_energy,
            self.rhs_dist_int,
            self.rhs_cross,
            self.gap,
        ]
    }
}

/// Terms at time `t_n = nτ` for one coupled pair `(X, Z)`.
pub fn svi_terms_one_path(
    x: &PathSample,
    z: &TestPath,
    spec: &TestProcessSpec,
    p: &SchemeParams,
    n: usize,
) -> Result<SviTerms> {
    let steps = x.increments.len();
    if n > steps {
        return Err(Error::IndexOutOfRange { index: n, max: steps });
    }
    if z.states.len() != x.states.len() {
        return Err(Error::LengthMismatch {
            expected: x.states.len(),
            found: z.states.len(),
        });
    }
    if z.noise_checksum != noise::checksum(&x.increments) {
        return Err(Error::CouplingMismatch);
    }
    let tau = p.tau;
    let diff = |i: usize| x.states[i].axpby(1.0, &z.states[i], -1.0);

    let mut energy_x = 0.0;
    let mut energy_z = 0.0;
    let mut dist = 0.0;
    let mut cross = 0.0;
    for i in 0..n {
        energy_x += energy_bar(&x.states[i], &p.energy, true)?;
        energy_z += energy_bar(&z.states[i], &p.energy, true)?;
        let d = diff(i)?;
        dist += lumped_norm_sq(&d);
        if let Some(g) = spec.drift_at(i) {
            cross += lumped_inner(&d, g)?;
        }
    }
    let init = x.states[0].axpby(1.0, &spec.z0, -1.0)?;
    Ok(SviTerms::compose(
        0.5 * lumped_norm_sq(&diff(n)?),
        tau * energy_x,
        0.5 * lumped_norm_sq(&init),
        tau * energy_z,
        0.5 * tau * dist,
        tau * cross,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McOptions {
    pub samples: usize,
    pub master_seed: u64,
    /// Evaluation time index `n`; `t = nτ`.
    pub step_index: usize,
    /// Discretization allowance `c` in `slack = c (τ + h)`.
    pub slack_c: f64,
    /// One-sided confidence level of the pass rule.
    pub confidence: f64,
    /// Replace Brownian increments by zeros.
    pub deterministic: bool,
    #[serde(skip)]
    pub workers: usize,
}

impl Default for McOptions {
    fn default() -> Self {
        Self {
            samples: 1000,
            master_seed: 0,
            step_index: 0,
            slack_c: 1.0,
            confidence: 0.99,
            deterministic: false,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SviParamsEcho {
    pub cells: usize,
    pub h: f64,
    pub tau: f64,
    pub steps: usize,
    pub epsilon: f64,
    pub lambda: f64,
    pub options: McOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SviTermEstimates {
    pub lhs_dist: Estimate,
    pub lhs_energy: Estimate,
    pub rhs_init: Estimate,
    pub rhs_energy: Estimate,
    pub rhs_dist_int: Estimate,
    pub rhs_cross: Estimate,
    pub gap: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SviReport {
    pub params: SviParamsEcho,
    pub terms: SviTermEstimates,
    pub sample_count: usize,
    pub slack: f64,
    pub z_value: f64,
    /// `−(slack + z · SE(gap))`; the audit passes iff `gap ≥ threshold`.
    pub threshold: f64,
    pub pass: bool,
    pub limitation: String,
}

impl SviReport {
    fn from_samples(samples: &[SviTerms], p: &SchemeParams, opts: &McOptions) -> Self {
        let column = |k: usize| -> Vec<f64> { samples.iter().map(|t| t.as_array()[k]).collect() };
        let est: Vec<Estimate> = (0..7).map(|k| Estimate::from_samples(&column(k))).collect();
        let means = SviTerms::compose(
            est[0].mean, est[1].mean, est[2].mean, est[3].mean, est[4].mean, est[5].mean,
        );
        let terms = SviTermEstimates {
            lhs_dist: est[0],
            lhs_energy: est[1],
            rhs_init: est[2],
            rhs_energy: est[3],
            rhs_dist_int: est[4],
            rhs_cross: est[5],
            gap: Estimate {
                mean: means.gap,
                std_err: est[6].std_err,
            },
        };
        let slack = opts.slack_c * (p.tau + p.mesh.h());
        let z_value = noise::normal_quantile(opts.confidence);
        let threshold = -(slack + z_value * terms.gap.std_err);
        SviReport {
            params: SviParamsEcho {
                cells: p.mesh.cells(),
                h: p.mesh.h(),
                tau: p.tau,
                steps: p.steps,
                epsilon: p.energy.epsilon,
                lambda: p.energy.lambda,
                options: *opts,
            },
            terms,
            sample_count: samples.len(),
            slack,
            z_value,
            threshold,
            pass: terms.gap.mean >= threshold,
            limitation: LIMITATION.to_string(),
        }
    }
}

fn validate(p: &SchemeParams, specs: &[TestProcessSpec], opts: &McOptions) -> Result<()> {
    if opts.samples < 2 {
        return Err(Error::param("samples", "at least two samples are required"));
    }
    if opts.workers == 0 {
        return Err(Error::param("workers", "at least one worker is required"));
    }
    if opts.step_index > p.steps {
        return Err(Error::IndexOutOfRange {
            index: opts.step_index,
            max: p.steps,
        });
    }
    if !(opts.confidence > 0.5 && opts.confidence < 1.0) {
        return Err(Error::param("confidence", "must lie in (0.5, 1)"));
    }
    if !(opts.slack_c >= 0.0) {
        return Err(Error::param("slack_c", "must be nonnegative"));
    }
    for s in specs {
        s.check_len(p.steps)?;
        same_mesh(&s.z0, &p.x0)?;
    }
    Ok(())
}

/// Audits several test processes against the same set of scheme paths.
///
/// Paths are solved in parallel on `opts.workers` threads; per-sample terms
/// are collected in path order and reduced sequentially, so the report does
/// not depend on the worker count.
pub fn mc_svi_many(p: &SchemeParams, specs: &[TestProcessSpec], opts: &McOptions) -> Result<Vec<SviReport>> {
    validate(p, specs, opts)?;
    let sample = |path: u64| -> Result<Vec<SviTerms>> {
        let increments = if opts.deterministic {
            noise::degenerate_increments(p.steps)
        } else {
            noise::sample_increments(&NoisePlan::new(p.steps, p.tau, opts.master_seed, path)?)
        };
        let x = solve_path(p, &increments)?;
        specs
            .iter()
            .map(|spec| {
                let z = roll_test_process(spec, &increments, p.tau)?;
                svi_terms_one_path(&x, &z, spec, p, opts.step_index)
            })
            .collect()
    };
    let wrap = |path: u64| {
        sample(path).map_err(|e| Error::PathFailed {
            path,
            source: Box::new(e),
        })
    };
    let per_path: Vec<Vec<SviTerms>> = if opts.workers == 1 {
        (0..opts.samples as u64).map(wrap).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .map_err(|e| Error::param("workers", e.to_string()))?;
        pool.install(|| {
            (0..opts.samples as u64)
                .into_par_iter()
                .map(wrap)
                .collect::<Result<_>>()
        })?
    };
    Ok((0..specs.len())
        .map(|k| {
            let column: Vec<SviTerms> = per_path.iter().map(|row| row[k]).collect();
            SviReport::from_samples(&column, p, opts)
        })
        .collect())
}

pub fn mc_svi(p: &SchemeParams, spec: &TestProcessSpec, opts: &McOptions) -> Result<SviReport> {
    let mut reports = mc_svi_many(p, std::slice::from_ref(spec), opts)?;
    Ok(reports.remove(0))
}
