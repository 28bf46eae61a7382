//! Implicit Euler–Maruyama step of the mass-lumped scheme and whole-path
//! integration.
//!
//! For every interior node `j` the new state `X` solves
//!
//! ```text
//! h(1 + τλ) X_j + τ [f_ε(δ_j X) − f_ε(δ_{j+1} X)] − τλ h g_j − h (1 + ΔW) prev_j = 0,
//! ```
//!
//! which is the first-order condition of the strictly convex functional
//! `½‖u‖_h² − ⟨(1+ΔW) prev, u⟩_h + τ ∫ sqrt(|∂ₓu|² + ε²) + (τλ/2)‖u − g‖_h²`.

mod functional;
mod newton;
mod oracle;

use std::sync::Arc;

use crate::energy::{self, EnergyParams};
use crate::error::{Error, Result};
use crate::fem::{same_mesh, FEFunction, Mesh1D};

use functional::Functional;
use newton::{damped_newton, NewtonOutcome};

/// Maximum absolute entry.
pub use newton::max_abs;

/// Iteration budget of the first-order oracle.
pub const ORACLE_MAX_ITER: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Bound on the scheme residual per unit mesh size: a step is accepted
    /// once `max_j |r_j| ≤ tol · h`, where `r_j` is the identity tested with
    /// the hat function of node `j`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 100,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SchemeParams {
    pub mesh: Arc<Mesh1D>,
    /// `ε`, `λ` and the projected data `g_h`.
    pub energy: EnergyParams,
    pub tau: f64,
    pub steps: usize,
    pub x0: FEFunction,
    pub solver: SolverOptions,
}

impl SchemeParams {
    pub fn new(
        energy: EnergyParams,
        tau: f64,
        steps: usize,
        x0: FEFunction,
        solver: SolverOptions,
    ) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::param("tau", format!("{tau} is not a positive step")));
        }
        if steps == 0 {
            return Err(Error::param("N", "at least one step is required"));
        }
        if !(solver.tol > 0.0) {
            return Err(Error::param("solver_tol", "must be positive"));
        }
        if !x0.is_dirichlet() {
            return Err(Error::NotDirichlet);
        }
        same_mesh(&x0, &energy.g)?;
        Ok(Self {
            mesh: x0.mesh().clone(),
            energy,
            tau,
            steps,
            x0,
            solver,
        })
    }

    pub fn g_h(&self) -> &FEFunction {
        &self.energy.g
    }

    pub fn final_time(&self) -> f64 {
        self.tau * self.steps as f64
    }

    fn step_functional<'a>(&'a self, rhs: &'a [f64]) -> Functional<'a> {
        Functional {
            h: self.mesh.h(),
            epsilon: self.energy.epsilon,
            mass: 1.0,
            rhs: Some(rhs),
            tv_weight: self.tau,
            fidelity: self.tau * self.energy.lambda,
            data: self.energy.g.interior(),
        }
    }

    fn check_input(&self, prev: &FEFunction) -> Result<()> {
        if self.energy.epsilon == 0.0 {
            return Err(Error::Unsupported("implicit step with epsilon = 0"));
        }
        if !prev.is_dirichlet() {
            return Err(Error::NotDirichlet);
        }
        same_mesh(prev, &self.x0)
    }
}

fn absorbed_rhs(prev: &FEFunction, dw: f64) -> Vec<f64> {
    prev.interior().iter().map(|x| (1.0 + dw) * x).collect()
}

/// One implicit step from `prev` with Brownian increment `dw`.
///
/// Damped Newton first; if it stalls the accelerated-gradient oracle
/// continues from the last Newton iterate.
pub fn step(prev: &FEFunction, dw: f64, p: &SchemeParams) -> Result<FEFunction> {
    p.check_input(prev)?;
    let rhs = absorbed_rhs(prev, dw);
    let f = p.step_functional(&rhs);
    let tol = p.solver.tol * p.mesh.h();
    let solution = match damped_newton(&f, rhs.clone(), tol, p.solver.max_iter) {
        NewtonOutcome::Converged { solution } => solution,
        NewtonOutcome::Stalled {
            last,
            residual,
            iterations,
        } => oracle::accelerated_gradient(&f, last, tol, ORACLE_MAX_ITER).map_err(|e| match e {
            Error::NoConvergence { residual: r, .. } => Error::NoConvergence {
                iterations: iterations + ORACLE_MAX_ITER,
                residual: r.min(residual),
            },
            other => other,
        })?,
    };
    FEFunction::from_interior(p.mesh.clone(), &solution)
}

/// Minimizes the per-step functional with right-hand side `b = (1+ΔW)·prev`
/// by accelerated gradient descent alone, to a residual of `tol·h/10`.
pub fn prox_oracle(b: &FEFunction, p: &SchemeParams) -> Result<FEFunction> {
    p.check_input(b)?;
    let rhs = b.interior().to_vec();
    let f = p.step_functional(&rhs);
    let tol = 0.1 * p.solver.tol * p.mesh.h();
    let solution = oracle::accelerated_gradient(&f, rhs.clone(), tol, ORACLE_MAX_ITER)?;
    FEFunction::from_interior(p.mesh.clone(), &solution)
}

/// Minimizer over the Dirichlet space of [`energy::discrete_energy`], the
/// energy the scheme dissipates, computed by the first-order oracle.
/// Stops once the residual drops below `tol·h`.
pub fn minimize_discrete_energy(e: &EnergyParams, start: &FEFunction, tol: f64) -> Result<FEFunction> {
    if e.epsilon == 0.0 {
        return Err(Error::Unsupported("stationary problem with epsilon = 0"));
    }
    same_mesh(start, &e.g)?;
    let mesh = start.mesh().clone();
    let f = Functional {
        h: mesh.h(),
        epsilon: e.epsilon,
        mass: 0.0,
        rhs: None,
        tv_weight: 1.0,
        fidelity: e.lambda,
        data: e.g.interior(),
    };
    let solution = oracle::accelerated_gradient(&f, start.interior().to_vec(), tol * mesh.h(), ORACLE_MAX_ITER)?;
    FEFunction::from_interior(mesh, &solution)
}

/// Per-step functional value `F(u)` for the right-hand side `b`.
pub fn step_functional_value(u: &FEFunction, b: &FEFunction, p: &SchemeParams) -> Result<f64> {
    same_mesh(u, b)?;
    let rhs = b.interior().to_vec();
    let f = p.step_functional(&rhs);
    Ok(f.value(u.interior(), &mut Vec::new()))
}

/// Scheme residual at every interior node: the identity tested with each
/// hat function, for candidate `next` after `prev` with increment `dw`.
pub fn step_residual(next: &FEFunction, prev: &FEFunction, dw: f64, p: &SchemeParams) -> Result<Vec<f64>> {
    same_mesh(next, prev)?;
    let rhs = absorbed_rhs(prev, dw);
    let f = p.step_functional(&rhs);
    let mut out = vec![0.0; f.len()];
    f.gradient(next.interior(), &mut out, &mut Vec::new());
    Ok(out)
}

/// One realization of the scheme.
#[derive(Debug, Clone)]
pub struct PathSample {
    pub params: SchemeParams,
    pub increments: Vec<f64>,
    /// `X^0, …, X^N`.
    pub states: Vec<FEFunction>,
    /// `energy_reg(X^i)`.
    pub energies: Vec<f64>,
    /// `discrete_energy(X^i)`.
    pub discrete_energies: Vec<f64>,
}

pub fn solve_path(p: &SchemeParams, increments: &[f64]) -> Result<PathSample> {
    if increments.len() != p.steps {
        return Err(Error::LengthMismatch {
            expected: p.steps,
            found: increments.len(),
        });
    }
    let mut states = Vec::with_capacity(p.steps + 1);
    let mut energies = Vec::with_capacity(p.steps + 1);
    let mut discrete = Vec::with_capacity(p.steps + 1);
    let mut current = p.x0.clone();
    energies.push(energy::energy_reg(&current, &p.energy)?);
    discrete.push(energy::discrete_energy(&current, &p.energy)?);
    for (i, &dw) in increments.iter().enumerate() {
        let next = step(&current, dw, p).map_err(|e| Error::StepFailed {
            step: i + 1,
            source: Box::new(e),
        })?;
        energies.push(energy::energy_reg(&next, &p.energy)?);
        discrete.push(energy::discrete_energy(&next, &p.energy)?);
        states.push(std::mem::replace(&mut current, next));
    }
    states.push(current);
    Ok(PathSample {
        params: p.clone(),
        increments: increments.to_vec(),
        states,
        energies,
        discrete_energies: discrete,
    })
}
