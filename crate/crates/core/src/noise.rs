//! Reproducible scalar Brownian increments.
//!
//! Every draw is a pure function of `(master_seed, path_index, step)`: the
//! path seed is `mix64(master_seed ^ mix64((path_index + 1) * GOLDEN))` and
//! the `k`-th uniform is the SplitMix64 output `mix64(path_seed + (k+1) *
//! GOLDEN)`. Uniforms are mapped to Gaussians by the inverse normal CDF, so
//! no draw is ever rejected and the stream is position-addressable.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn path_seed(master_seed: u64, path_index: u64) -> u64 {
    mix64(master_seed ^ mix64(path_index.wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// Position-addressable uniform stream on the open interval (0, 1).
#[derive(Debug, Clone, Copy)]
pub struct UniformStream {
    seed: u64,
}

impl UniformStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    #[inline]
    pub fn at(&self, k: u64) -> f64 {
        let bits = mix64(self.seed.wrapping_add(k.wrapping_add(1).wrapping_mul(GOLDEN)));
        ((bits >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal draw at position `k`.
    #[inline]
    pub fn normal_at(&self, k: u64) -> f64 {
        standard_normal().inverse_cdf(self.at(k))
    }
}

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal parameters are valid")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisePlan {
    pub steps: usize,
    pub tau: f64,
    pub master_seed: u64,
    pub path_index: u64,
}

impl NoisePlan {
    pub fn new(steps: usize, tau: f64, master_seed: u64, path_index: u64) -> Result<Self> {
        if steps == 0 {
            return Err(Error::param("N", "at least one step is required"));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::param("tau", format!("{tau} is not a positive step")));
        }
        Ok(Self {
            steps,
            tau,
            master_seed,
            path_index,
        })
    }
}

/// `N` independent `Normal(0, τ)` increments for the plan's path.
pub fn sample_increments(plan: &NoisePlan) -> Vec<f64> {
    let stream = UniformStream::new(path_seed(plan.master_seed, plan.path_index));
    let scale = plan.tau.sqrt();
    (0..plan.steps as u64)
        .map(|k| scale * stream.normal_at(k))
        .collect()
}

/// All-zero increments; the scheme then reduces to the deterministic
/// implicit regularized TV flow.
pub fn degenerate_increments(steps: usize) -> Vec<f64> {
    vec![0.0; steps]
}

/// Sums consecutive blocks of `factor` fine increments, yielding the
/// increments of the same Brownian path on a grid `factor` times coarser.
pub fn aggregate_increments(fine: &[f64], factor: usize) -> Result<Vec<f64>> {
    if factor == 0 || !fine.len().is_multiple_of(factor) {
        return Err(Error::param(
            "factor",
            format!("{factor} does not divide {} increments", fine.len()),
        ));
    }
    Ok(fine.chunks(factor).map(|c| c.iter().sum()).collect())
}

/// Order-sensitive fingerprint of an increment array.
pub fn checksum(increments: &[f64]) -> u64 {
    increments
        .iter()
        .fold(0x243f_6a88_85a3_08d3, |acc, x| mix64(acc ^ x.to_bits()))
}

/// Upper `p`-quantile of the standard normal distribution.
pub fn normal_quantile(p: f64) -> f64 {
    standard_normal().inverse_cdf(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_plan() {
        let plan = NoisePlan::new(50, 0.01, 42, 3).unwrap();
        let a = sample_increments(&plan);
        let b = sample_increments(&plan);
        assert_eq!(
            a.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            b.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
        );
        let other = sample_increments(&NoisePlan { path_index: 4, ..plan });
        assert_ne!(a, other);
    }

    #[test]
    fn pooled_moments() {
        let tau = 0.02;
        let mut draws = Vec::with_capacity(1_000_000);
        for path in 0..1000 {
            draws.extend(sample_increments(&NoisePlan::new(1000, tau, 7, path).unwrap()));
        }
        let n = draws.len() as f64;
        let mean = draws.iter().sum::<f64>() / n;
        let var = draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() <= 4.0 * (tau / n).sqrt(), "mean {mean}");
        assert!((var / tau - 1.0).abs() < 0.01, "variance {var}");
    }

    #[test]
    fn streams_are_uncorrelated() {
        let n = 100_000;
        let a = sample_increments(&NoisePlan::new(n, 1.0, 11, 0).unwrap());
        let b = sample_increments(&NoisePlan::new(n, 1.0, 11, 1).unwrap());
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (ma, mb) = (mean(&a), mean(&b));
        let cov: f64 = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
        let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
        let rho = cov / (va * vb).sqrt();
        assert!(rho.abs() < 0.01, "rho {rho}");
    }

    #[test]
    fn degenerate() {
        assert_eq!(degenerate_increments(3), vec![0.0; 3]);
        assert_eq!(degenerate_increments(1), vec![0.0]);
    }

    #[test]
    fn aggregation_preserves_path_sums() {
        let fine = sample_increments(&NoisePlan::new(16, 1.0 / 16.0, 5, 0).unwrap());
        let coarse = aggregate_increments(&fine, 4).unwrap();
        assert_eq!(coarse.len(), 4);
        let total: f64 = fine.iter().sum();
        assert!((coarse.iter().sum::<f64>() - total).abs() < 1e-14);
        assert!(aggregate_increments(&fine, 3).is_err());
    }

    #[test]
    fn rejects_invalid_plans() {
        assert!(NoisePlan::new(0, 0.1, 0, 0).is_err());
        assert!(NoisePlan::new(3, 0.0, 0, 0).is_err());
    }

    #[test]
    fn quantile() {
        assert!((normal_quantile(0.99) - 2.326_347_874).abs() < 1e-8);
    }
}
