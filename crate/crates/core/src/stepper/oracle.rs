//! First-order minimizer used as an independent check of the Newton step and
//! as the reference solver for stationary problems.
//!
//! Accelerated gradient descent in the lumped metric with step `1/L`, where
//! `L` is the closed-form bound from [`Functional::lipschitz_bound`], and
//! gradient-based adaptive restart. Only gradients are evaluated, so the
//! method keeps making progress below the resolution of functional values.

use super::functional::Functional;
use super::newton::max_abs;
use crate::error::{Error, Result};

pub(crate) fn accelerated_gradient(
    f: &Functional<'_>,
    start: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let n = f.len();
    let step = 1.0 / (f.lipschitz_bound() * f.h);
    let mut scratch = Vec::with_capacity(n + 1);
    let mut x = start;
    let mut y = x.clone();
    let mut x_next = vec![0.0; n];
    let mut gy = vec![0.0; n];
    let mut gx = vec![0.0; n];
    let mut t = 1.0_f64;
    let mut residual = f64::INFINITY;

    for it in 0..max_iter {
        if it % 8 == 0 {
            f.gradient(&x, &mut gx, &mut scratch);
            residual = max_abs(&gx);
            if residual <= tol {
                return Ok(x);
            }
        }
        f.gradient(&y, &mut gy, &mut scratch);
        for ((xn, yi), g) in x_next.iter_mut().zip(&y).zip(&gy) {
            *xn = yi - step * g;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let mut progress = 0.0;
        for ((xn, xi), g) in x_next.iter().zip(&x).zip(&gy) {
            progress += g * (xn - xi);
        }
        if progress > 0.0 {
            t = 1.0;
            y.copy_from_slice(&x_next);
        } else {
            let beta = (t - 1.0) / t_next;
            for ((yi, xn), xi) in y.iter_mut().zip(&x_next).zip(&x) {
                *yi = xn + beta * (xn - xi);
            }
            t = t_next;
        }
        std::mem::swap(&mut x, &mut x_next);
    }
    f.gradient(&x, &mut gx, &mut scratch);
    let final_residual = max_abs(&gx);
    if final_residual <= tol {
        return Ok(x);
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: residual.min(final_residual),
    })
}
