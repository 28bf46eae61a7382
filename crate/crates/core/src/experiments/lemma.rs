use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::energy::lemma_pairing;
use crate::error::{Error, Result};
use crate::fem::{make_mesh, FEFunction, Mesh1D};
use crate::noise::{path_seed, UniformStream};

/// Smallest pairing value still counted as nonnegative.
pub const LEMMA_THRESHOLD: f64 = -1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaCell {
    pub cells: usize,
    pub epsilon: f64,
    pub trials: usize,
    pub min_pairing: f64,
    /// Pairing of a linear profile; zero because all slopes coincide.
    pub canary_pairing: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub seed: u64,
    pub threshold: f64,
    pub cells: Vec<LemmaCell>,
    pub pass: bool,
}

/// Dirichlet function with interior values uniform in `[-amplitude, amplitude]`,
/// drawn from positions `offset..` of `stream`.
pub fn random_dirichlet(mesh: &Arc<Mesh1D>, stream: &UniformStream, offset: u64, amplitude: f64) -> FEFunction {
    let interior: Vec<f64> = (0..mesh.cells() as u64 - 1)
        .map(|k| amplitude * (2.0 * stream.at(offset + k) - 1.0))
        .collect();
    FEFunction::from_interior(mesh.clone(), &interior).expect("interior length matches the mesh")
}

/// Minimum of the Laplacian pairing over random Dirichlet functions with
/// nodal values in `[-10, 10]`, for every `(J, ε)` combination.
pub fn lemma_sweep(cells: &[usize], epsilons: &[f64], trials: usize, seed: u64) -> Result<LemmaReport> {
    if trials == 0 {
        return Err(Error::param("trials", "at least one trial is required"));
    }
    if cells.is_empty() || epsilons.is_empty() {
        return Err(Error::param("cells", "need at least one mesh and one epsilon"));
    }
    if let Some(e) = epsilons.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Error::param("epsilon", format!("{e} is not positive")));
    }
    let mut out = Vec::with_capacity(cells.len() * epsilons.len());
    let mut index = 0u64;
    for &j in cells {
        let mesh = make_mesh(j)?;
        let canary = FEFunction::interpolate(|x| 3.0 * x - 1.0, mesh.clone(), false);
        for &eps in epsilons {
            let stream = UniformStream::new(path_seed(seed, index));
            index += 1;
            let stride = j as u64;
            let min_pairing = (0..trials as u64)
                .map(|t| lemma_pairing(&random_dirichlet(&mesh, &stream, t * stride, 10.0), eps))
                .fold(f64::INFINITY, f64::min);
            let canary_pairing = lemma_pairing(&canary, eps);
            out.push(LemmaCell {
                cells: j,
                epsilon: eps,
                trials,
                min_pairing,
                canary_pairing,
                pass: min_pairing >= LEMMA_THRESHOLD,
            });
        }
    }
    let pass = out.iter().all(|c| c.pass);
    Ok(LemmaReport {
        seed,
        threshold: LEMMA_THRESHOLD,
        cells: out,
        pass,
    })
}
