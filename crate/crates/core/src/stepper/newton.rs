use super::functional::Functional;
use crate::fem::dot;

pub(crate) enum NewtonOutcome {
    Converged { solution: Vec<f64> },
    Stalled { last: Vec<f64>, residual: f64, iterations: usize },
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves `T x = rhs` for a symmetric tridiagonal `T` (Thomas algorithm).
/// The matrices met here are diagonally dominant, so no pivoting is needed.
pub(crate) fn solve_tridiagonal(diag: &[f64], off: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut denom = diag[0];
    if n > 1 {
        c[0] = off[0] / denom;
    }
    rhs[0] /= denom;
    for i in 1..n {
        denom = diag[i] - off[i - 1] * c[i - 1];
        if i + 1 < n {
            c[i] = off[i] / denom;
        }
        rhs[i] = (rhs[i] - off[i - 1] * rhs[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

/// Damped Newton with Armijo backtracking on the functional value.
pub(crate) fn damped_newton(
    f: &Functional<'_>,
    mut u: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> NewtonOutcome {
    let n = f.len();
    let mut scratch = Vec::with_capacity(n + 1);
    let mut r = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut trial = vec![0.0; n];
    let mut trial_r = vec![0.0; n];

    f.gradient(&u, &mut r, &mut scratch);
    let mut residual = max_abs(&r);
    for it in 0..max_iter {
        if residual <= tol {
            return NewtonOutcome::Converged { solution: u };
        }
        f.hessian(&u, &mut diag, &mut off, &mut scratch);
        let mut dir: Vec<f64> = r.iter().map(|x| -x).collect();
        solve_tridiagonal(&diag, &off, &mut dir);

        // Full step first: accepted whenever it halves the residual, which
        // is what keeps quadratic convergence once F values lose resolution.
        for ((w, x), d) in trial.iter_mut().zip(&u).zip(&dir) {
            *w = x + d;
        }
        f.gradient(&trial, &mut trial_r, &mut scratch);
        let mut trial_residual = max_abs(&trial_r);
        if trial_residual > 0.5 * residual {
            let slope = dot(&r, &dir);
            let f0 = f.value(&u, &mut scratch);
            let mut t = 1.0;
            let mut accepted = false;
            while t >= 1e-10 {
                for ((w, x), d) in trial.iter_mut().zip(&u).zip(&dir) {
                    *w = x + t * d;
                }
                if f.value(&trial, &mut scratch) <= f0 + 1e-4 * t * slope {
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if accepted {
                f.gradient(&trial, &mut trial_r, &mut scratch);
                trial_residual = max_abs(&trial_r);
            }
            // A step that F accepts only within round-off and that does not lower
            // the residual is no progress.
            let unresolved = slope.abs() <= 1e-14 * f0.abs().max(1.0) && trial_residual >= residual;
            if !accepted || unresolved {
                return NewtonOutcome::Stalled {
                    last: u,
                    residual,
                    iterations: it,
                };
            }
        }
        std::mem::swap(&mut u, &mut trial);
        std::mem::swap(&mut r, &mut trial_r);
        residual = trial_residual;
    }
    if residual <= tol {
        NewtonOutcome::Converged { solution: u }
    } else {
        NewtonOutcome::Stalled {
            last: u,
            residual,
            iterations: max_iter,
        }
    }
}
