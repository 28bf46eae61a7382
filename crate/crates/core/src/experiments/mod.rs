//! Experiment drivers behind the command-line front end.

mod converge;
mod denoise;
mod lemma;

pub use converge::{convergence_study, ConvergenceMode, ConvergenceRow, ConvergenceSetup, ConvergenceTable, ErrorMetric};
pub use denoise::{denoise, DenoiseOutcome, DenoiseSummary, DENOISE_ENERGY_TOL};
pub use lemma::{lemma_sweep, random_dirichlet, LemmaCell, LemmaReport, LEMMA_THRESHOLD};
