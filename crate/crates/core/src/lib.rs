//! Fully discrete approximation of the stochastic total variation flow
//!
//! ```text
//! dX = div(∇X / sqrt(|∇X|² + ε²)) dt − λ(X − g) dt + X dW   on (0,1),  X = 0 on the boundary,
//! ```
//!
//! with mass-lumped P1 elements and an implicit Euler–Maruyama step, plus
//! the machinery to check the discrete Laplacian sign property and the
//! stochastic variational inequality characterizing the solution.

// `!(x > 0.0)` style checks deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod energy;
pub mod error;
pub mod experiments;
pub mod fem;
pub mod noise;
pub mod profiles;
pub mod stats;
pub mod stepper;
pub mod svi;

pub use energy::{
    assembled_pairing, discrete_energy, energy_bar, energy_reg, energy_tv, flux, lemma_pairing,
    EnergyParams,
};
pub use error::{Error, Result};
pub use fem::{
    discrete_laplacian, gradient_cellwise, l2_inner, lumped_inner, lumped_norm_sq,
    lumped_projection, make_mesh, CellField, FEFunction, Mesh1D, Projection,
};
pub use noise::{degenerate_increments, sample_increments, NoisePlan};
pub use profiles::Profile;
pub use stepper::{prox_oracle, solve_path, step, PathSample, SchemeParams, SolverOptions};
pub use svi::{
    mc_svi, mc_svi_many, roll_test_process, svi_terms_one_path, Drift, McOptions, SviReport,
    SviTerms, TestProcessSpec,
};
