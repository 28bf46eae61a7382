//! Regularized flux, total variation energies and the discrete Laplacian
//! pairing whose sign controls the a priori estimate of the scheme.

use crate::error::{Error, Result};
use crate::fem::{self, cell_slopes, same_mesh, FEFunction};

/// Regularization and fidelity parameters of the energy.
#[derive(Debug, Clone)]
pub struct EnergyParams {
    pub epsilon: f64,
    pub lambda: f64,
    /// Data term. Ignored when `lambda == 0`, but must share the mesh.
    pub g: FEFunction,
}

impl EnergyParams {
    pub fn new(epsilon: f64, lambda: f64, g: FEFunction) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::param("epsilon", format!("{epsilon} is not a finite value >= 0")));
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::param("lambda", format!("{lambda} is not a finite value >= 0")));
        }
        Ok(Self { epsilon, lambda, g })
    }
}

/// `s / sqrt(s² + ε²)`. At `ε = 0` the subgradient selection `flux(0, 0) = 0`
/// is returned, which keeps the map odd and total.
#[inline]
pub fn flux(s: f64, epsilon: f64) -> f64 {
    if epsilon == 0.0 {
        if s == 0.0 {
            0.0
        } else {
            s.signum()
        }
    } else {
        s / s.hypot(epsilon)
    }
}

/// Derivative `ε² / (s² + ε²)^{3/2}`; bounded by `1/ε`.
#[inline]
pub fn flux_derivative(s: f64, epsilon: f64) -> f64 {
    let r = s.hypot(epsilon);
    (epsilon / r) * (epsilon / r) / r
}

#[inline]
pub(crate) fn density(s: f64, epsilon: f64) -> f64 {
    s.hypot(epsilon)
}

fn gradient_term(v: &FEFunction, epsilon: f64) -> f64 {
    let h = v.mesh().h();
    cell_slopes(v.values(), h)
        .into_iter()
        .map(|s| h * density(s, epsilon))
        .sum()
}

fn fidelity(v: &FEFunction, p: &EnergyParams) -> Result<f64> {
    same_mesh(v, &p.g)?;
    if p.lambda == 0.0 {
        return Ok(0.0);
    }
    let diff = v.axpby(1.0, &p.g, -1.0)?;
    Ok(0.5 * p.lambda * fem::l2_inner(&diff, &diff)?)
}

/// `Σ_j h sqrt((δv_j)² + ε²) + (λ/2)‖v − g‖²` with the exact L² norm.
///
/// The additive constant `ε |(0,1)| = ε` of the regularized density is kept.
pub fn energy_reg(v: &FEFunction, p: &EnergyParams) -> Result<f64> {
    Ok(gradient_term(v, p.epsilon) + fidelity(v, p)?)
}

/// Total variation plus fidelity; `energy_reg` at `ε = 0`.
pub fn energy_tv(v: &FEFunction, p: &EnergyParams) -> Result<f64> {
    Ok(gradient_term(v, 0.0) + fidelity(v, p)?)
}

/// Interior energy plus the trace penalty `|v(0)| + |v(1)|`.
pub fn energy_bar(v: &FEFunction, p: &EnergyParams, regularized: bool) -> Result<f64> {
    let interior = if regularized {
        energy_reg(v, p)?
    } else {
        energy_tv(v, p)?
    };
    let x = v.values();
    Ok(interior + x[0].abs() + x[x.len() - 1].abs())
}

/// Energy whose implicit gradient flow the lumped scheme realizes: the
/// fidelity term uses the lumped norm `‖v − g‖_h²` instead of the exact L²
/// norm. Coincides with [`energy_reg`] when `λ = 0`.
pub fn discrete_energy(v: &FEFunction, p: &EnergyParams) -> Result<f64> {
    same_mesh(v, &p.g)?;
    let mut e = gradient_term(v, p.epsilon);
    if p.lambda != 0.0 {
        let h = v.mesh().h();
        let sq: f64 = v
            .interior()
            .iter()
            .zip(p.g.interior())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        e += 0.5 * p.lambda * h * sq;
    }
    Ok(e)
}

/// Telescoped form of `⟨f_ε(∂ₓv), ∂ₓ(−Δ_h v)⟩`:
/// `(1/h) Σ_{j=1}^{J-1} (f_ε(δ_{j+1}) − f_ε(δ_j)) (δ_{j+1} − δ_j)`.
///
/// Each summand is nonnegative because `f_ε` is monotone.
pub fn lemma_pairing(v: &FEFunction, epsilon: f64) -> f64 {
    let h = v.mesh().h();
    let slopes = cell_slopes(v.values(), h);
    let sum: f64 = slopes
        .windows(2)
        .map(|w| (flux(w[1], epsilon) - flux(w[0], epsilon)) * (w[1] - w[0]))
        .sum();
    sum / h
}

/// The same pairing assembled cell by cell from the gradient of `v` and the
/// gradient of `−Δ_h v`.
pub fn assembled_pairing(v: &FEFunction, epsilon: f64) -> Result<f64> {
    let h = v.mesh().h();
    let lap = fem::discrete_laplacian(v)?;
    let grad_v = fem::gradient_cellwise(v);
    let grad_lap = fem::gradient_cellwise(&lap);
    Ok(grad_v
        .values()
        .iter()
        .zip(grad_lap.values())
        .map(|(&s, &l)| h * flux(s, epsilon) * (-l))
        .sum())
}

/// `Σ_j h f_ε(δw_j)(δu_j − δw_j)`, the directional derivative of the
/// gradient term at `w` towards `u`.
pub fn flux_pairing(u: &FEFunction, w: &FEFunction, epsilon: f64) -> Result<f64> {
    same_mesh(u, w)?;
    let h = u.mesh().h();
    let du = cell_slopes(u.values(), h);
    let dw = cell_slopes(w.values(), h);
    Ok(du
        .iter()
        .zip(&dw)
        .map(|(a, b)| h * flux(*b, epsilon) * (a - b))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::make_mesh;
    use std::sync::Arc;

    fn params(mesh: &Arc<crate::fem::Mesh1D>, eps: f64, lambda: f64) -> EnergyParams {
        EnergyParams::new(eps, lambda, FEFunction::zeros(mesh.clone(), true)).unwrap()
    }

    fn fe(mesh: &Arc<crate::fem::Mesh1D>, v: &[f64], dirichlet: bool) -> FEFunction {
        FEFunction::new(mesh.clone(), v.to_vec(), dirichlet).unwrap()
    }

    #[test]
    fn flux_examples() {
        assert!((flux(4.0, 1.0) - 4.0 / 17f64.sqrt()).abs() < 1e-15);
        assert!((flux(4.0, 1.0) - 0.970142).abs() < 1e-6);
        assert_eq!(flux(0.0, 0.5), 0.0);
        assert!((flux(1e12, 1.0) - 1.0).abs() < 1e-12);
        assert_eq!(flux(0.0, 0.0), 0.0);
        assert_eq!(flux(-3.0, 0.0), -1.0);
    }

    #[test]
    fn energy_reg_examples() {
        let m = make_mesh(4).unwrap();
        let v = fe(&m, &[0.0, 1.0, 2.0, 1.0, 0.0], true);
        assert_eq!(energy_reg(&v, &params(&m, 0.0, 0.0)).unwrap(), 4.0);
        assert_eq!(energy_reg(&v, &params(&m, 3.0, 0.0)).unwrap(), 5.0);
        let z = FEFunction::zeros(m.clone(), true);
        assert!((energy_reg(&z, &params(&m, 0.37, 0.0)).unwrap() - 0.37).abs() < 1e-15);
    }

    #[test]
    fn energy_tv_examples() {
        let m2 = make_mesh(2).unwrap();
        let hat = fe(&m2, &[0.0, 1.0, 0.0], true);
        assert_eq!(energy_tv(&hat, &params(&m2, 0.5, 0.0)).unwrap(), 2.0);
        let z = FEFunction::zeros(m2.clone(), true);
        assert_eq!(energy_tv(&z, &params(&m2, 0.5, 3.0)).unwrap(), 0.0);
        let p = EnergyParams::new(0.0, 2.0, hat).unwrap();
        assert!((energy_tv(&z, &p).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn energy_bar_examples() {
        let m = make_mesh(4).unwrap();
        let v = fe(&m, &[0.0, 1.0, 2.0, 1.0, 0.0], true);
        let p = params(&m, 0.2, 1.5);
        assert_eq!(energy_bar(&v, &p, true).unwrap(), energy_reg(&v, &p).unwrap());
        let one = FEFunction::interpolate(|_| 1.0, m.clone(), false);
        assert_eq!(energy_bar(&one, &params(&m, 0.0, 0.0), true).unwrap(), 2.0);
        let jump = fe(&m, &[1.0, 1.0, 0.0, 0.0, 0.0], false);
        assert_eq!(energy_bar(&jump, &params(&m, 0.0, 0.0), false).unwrap(), 2.0);
    }

    #[test]
    fn lemma_pairing_examples() {
        let m = make_mesh(4).unwrap();
        let v = fe(&m, &[0.0, 1.0, 2.0, 1.0, 0.0], true);
        let expected = 256.0 / 17f64.sqrt();
        assert!((lemma_pairing(&v, 1.0) - expected).abs() < 1e-12);
        assert!((lemma_pairing(&v, 1.0) - 62.089_120_009).abs() < 1e-8);
        assert!((assembled_pairing(&v, 1.0).unwrap() - expected).abs() < 1e-12);
        // Linear profile, all slopes equal.
        let ramp = FEFunction::interpolate(|x| 2.0 * x, m.clone(), false);
        assert_eq!(lemma_pairing(&ramp, 0.3), 0.0);
        assert_eq!(lemma_pairing(&FEFunction::zeros(m, true), 0.3), 0.0);
    }

    #[test]
    fn discrete_energy_matches_reg_without_fidelity() {
        let m = make_mesh(5).unwrap();
        let v = fe(&m, &[0.0, 0.2, -1.0, 3.0, 0.5, 0.0], true);
        let p = params(&m, 0.1, 0.0);
        assert_eq!(discrete_energy(&v, &p).unwrap(), energy_reg(&v, &p).unwrap());
    }

    #[test]
    fn rejects_bad_params() {
        let m = make_mesh(2).unwrap();
        let g = FEFunction::zeros(m, true);
        assert!(EnergyParams::new(-0.1, 0.0, g.clone()).is_err());
        assert!(EnergyParams::new(0.1, -1.0, g.clone()).is_err());
        assert!(EnergyParams::new(f64::NAN, 0.0, g).is_err());
    }

    #[test]
    fn mesh_mismatch_is_reported() {
        let m2 = make_mesh(2).unwrap();
        let m4 = make_mesh(4).unwrap();
        let p = params(&m2, 0.1, 1.0);
        assert!(matches!(
            energy_reg(&FEFunction::zeros(m4, true), &p),
            Err(Error::MeshMismatch { .. })
        ));
    }
}
