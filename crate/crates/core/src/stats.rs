//! Order-fixed reductions for Monte Carlo aggregation.

use serde::{Deserialize, Serialize};

/// Pairwise (cascade) summation in index order. The result depends only on
/// the order of `values`, never on how the values were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 16;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self {
            mean: value,
            std_err: 0.0,
        }
    }

    pub fn from_samples(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self::exact(f64::NAN);
        }
        let mean = pairwise_sum(values) / n as f64;
        if n < 2 {
            return Self::exact(mean);
        }
        let sq: Vec<f64> = values.iter().map(|x| (x - mean) * (x - mean)).collect();
        let var = pairwise_sum(&sq) / (n - 1) as f64;
        Self {
            mean,
            std_err: (var / n as f64).sqrt(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_sum_matches_naive_on_integers() {
        let v: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&v), 500_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn estimate_of_constant_has_no_error() {
        let e = Estimate::from_samples(&[2.5; 10]);
        assert_eq!(e, Estimate::exact(2.5));
    }

    #[test]
    fn estimate_standard_error() {
        // Sample variance of (1,2,3,4) is 5/3.
        let e = Estimate::from_samples(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.mean, 2.5);
        assert!((e.std_err - (5.0 / 3.0 / 4.0f64).sqrt()).abs() < 1e-15);
    }
}
