//! Strictly convex functional behind both the implicit step and the
//! stationary problem, posed on interior nodal values:
//!
//! `Q(u) = (m/2)‖u‖_h² − ⟨b,u⟩_h + κ Σ_j h sqrt(δ_j² + ε²) + (μ/2)‖u − g‖_h²`
//!
//! The implicit step uses `m = 1, κ = τ, μ = τλ`; the stationary energy uses
//! `m = 0, b = 0, κ = 1, μ = λ`.

use crate::energy::{density, flux, flux_derivative};

pub(crate) struct Functional<'a> {
    pub h: f64,
    pub epsilon: f64,
    pub mass: f64,
    pub rhs: Option<&'a [f64]>,
    pub tv_weight: f64,
    pub fidelity: f64,
    pub data: &'a [f64],
}

/// Cell slopes of the Dirichlet function with interior values `u`.
pub(crate) fn slopes(u: &[f64], h: f64, out: &mut Vec<f64>) {
    out.clear();
    let mut prev = 0.0;
    for &x in u {
        out.push((x - prev) / h);
        prev = x;
    }
    out.push(-prev / h);
}

impl Functional<'_> {
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn value(&self, u: &[f64], scratch: &mut Vec<f64>) -> f64 {
        let h = self.h;
        slopes(u, h, scratch);
        let tv: f64 = scratch.iter().map(|&s| h * density(s, self.epsilon)).sum();
        let mut quad = 0.0;
        for (j, &x) in u.iter().enumerate() {
            let mut q = 0.5 * self.mass * x * x;
            if let Some(b) = self.rhs {
                q -= b[j] * x;
            }
            if self.fidelity != 0.0 {
                let d = x - self.data[j];
                q += 0.5 * self.fidelity * d * d;
            }
            quad += q;
        }
        h * quad + self.tv_weight * tv
    }

    /// Euclidean gradient with respect to the interior nodal values; entry `j`
    /// is the scheme residual tested with the hat function of node `j`.
    pub fn gradient(&self, u: &[f64], out: &mut [f64], scratch: &mut Vec<f64>) {
        let h = self.h;
        slopes(u, h, scratch);
        for (j, &x) in u.iter().enumerate() {
            let mut g = self.mass * x;
            if let Some(b) = self.rhs {
                g -= b[j];
            }
            if self.fidelity != 0.0 {
                g += self.fidelity * (x - self.data[j]);
            }
            out[j] = h * g
                + self.tv_weight
                    * (flux(scratch[j], self.epsilon) - flux(scratch[j + 1], self.epsilon));
        }
    }

    /// Symmetric tridiagonal Hessian: `diag[j]` and `off[j] = H[j][j+1]`.
    pub fn hessian(&self, u: &[f64], diag: &mut [f64], off: &mut [f64], scratch: &mut Vec<f64>) {
        let h = self.h;
        slopes(u, h, scratch);
        let c = self.tv_weight / h;
        let base = h * (self.mass + self.fidelity);
        for j in 0..u.len() {
            let left = flux_derivative(scratch[j], self.epsilon);
            let right = flux_derivative(scratch[j + 1], self.epsilon);
            diag[j] = base + c * (left + right);
            if j + 1 < u.len() {
                off[j] = -c * right;
            }
        }
    }

    /// Bound on the Lipschitz constant of the gradient in the lumped metric,
    /// from `f_ε' ≤ 1/ε` and Gershgorin on the stiffness stencil.
    pub fn lipschitz_bound(&self) -> f64 {
        self.mass + self.fidelity + 4.0 * self.tv_weight / (self.h * self.h * self.epsilon)
    }
}
