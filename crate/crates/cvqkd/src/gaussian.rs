//! Gaussian sampling and the Shannon-theory primitives every other module
//! consumes.
//!
//! All information quantities are carried in bits (log base 2) throughout
//! the crate; nothing downstream ever mixes log bases.

use crate::error::{Error, Result};
use crate::rng::SimRng;
use std::fmt;
use std::ops::{Add, Sub};

/// An information quantity in bits.
///
/// Mutual-information outputs are always finite and non-negative; derived
/// quantities such as key-rate differences may go negative and say so in
/// their contracts.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Bits(pub f64);

impl Bits {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6} bits", self.0)
    }
}

impl Add for Bits {
    type Output = Bits;
    fn add(self, rhs: Bits) -> Bits {
        Bits(self.0 + rhs.0)
    }
}

impl Sub for Bits {
    type Output = Bits;
    fn sub(self, rhs: Bits) -> Bits {
        Bits(self.0 - rhs.0)
    }
}

/// Draw from Normal(mean, variance). Zero variance returns `mean` exactly.
pub fn sample_gaussian(mean: f64, variance: f64, rng: &mut SimRng) -> Result<f64> {
    if !variance.is_finite() || variance < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "variance must be finite and >= 0, got {variance}"
        )));
    }
    if variance == 0.0 {
        return Ok(mean);
    }
    Ok(mean + variance.sqrt() * rng.standard_normal())
}

/// Differential entropy of a Gaussian: h = (1/2) log2(2 pi e variance).
pub fn differential_entropy(variance: f64) -> Result<Bits> {
    if !variance.is_finite() || variance <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "variance must be finite and > 0, got {variance}"
        )));
    }
    Ok(Bits(0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * variance).log2()))
}

/// Mutual information of a Gaussian additive-noise channel:
/// I = h(y) - h(y|x) = (1/2) log2(1 + signal/noise).
pub fn gaussian_mutual_information(signal_variance: f64, noise_variance: f64) -> Result<Bits> {
    if !signal_variance.is_finite() || signal_variance < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "signal variance must be finite and >= 0, got {signal_variance}"
        )));
    }
    if !noise_variance.is_finite() || noise_variance <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "noise variance must be finite and > 0, got {noise_variance}"
        )));
    }
    Ok(Bits(0.5 * (1.0 + signal_variance / noise_variance).log2()))
}

/// Unbiased sample mean and variance (n - 1 denominator).
pub fn sample_mean_variance(xs: &[f64]) -> Result<(f64, f64)> {
    if xs.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 samples, got {}",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ss = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    Ok((mean, ss / (n - 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_variance_of(mean: f64, var: f64, seed: u64, n: usize) -> f64 {
        let mut rng = SimRng::new(seed);
        let xs: Vec<f64> = (0..n)
            .map(|_| sample_gaussian(mean, var, &mut rng).unwrap())
            .collect();
        sample_mean_variance(&xs).unwrap().1
    }

    #[test]
    fn zero_variance_returns_mean_exactly() {
        let mut rng = SimRng::new(1);
        assert_eq!(sample_gaussian(5.0, 0.0, &mut rng).unwrap(), 5.0);
    }

    #[test]
    fn negative_variance_rejected() {
        let mut rng = SimRng::new(1);
        assert!(matches!(
            sample_gaussian(0.0, -1.0, &mut rng),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn unit_variance_monte_carlo() {
        let v = sample_variance_of(0.0, 1.0, 42, 1_000_000);
        assert!((v - 1.0).abs() < 0.01, "sample variance {v}");
    }

    #[test]
    fn eighth_variance_monte_carlo() {
        let v = sample_variance_of(0.0, 0.125, 7, 1_000_000);
        assert!((v - 0.125).abs() < 0.00125, "sample variance {v}");
    }

    #[test]
    fn entropy_of_reference_variances() {
        // variance 1/(2 pi e) has zero entropy
        let v0 = 1.0 / (2.0 * std::f64::consts::PI * std::f64::consts::E);
        assert!(differential_entropy(v0).unwrap().0.abs() < 1e-14);
        // unit variance: high-precision evaluation of the closed form
        let h1 = differential_entropy(1.0).unwrap().0;
        assert!((h1 - 2.047_095_585_180_641_1).abs() < 1e-12, "h(1) = {h1}");
        // quadrupling the variance adds exactly one bit
        let h4 = differential_entropy(4.0).unwrap().0;
        assert!((h4 - h1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_rejects_nonpositive_variance() {
        assert!(differential_entropy(0.0).is_err());
        assert!(differential_entropy(-2.0).is_err());
    }

    #[test]
    fn mutual_information_reference_points() {
        assert_eq!(gaussian_mutual_information(0.0, 3.0).unwrap().0, 0.0);
        // SNR 3 carries exactly one bit
        let one = gaussian_mutual_information(3.0, 1.0).unwrap().0;
        assert!((one - 1.0).abs() < 1e-15);
        // SNR 15: half of log2(16)
        let two = gaussian_mutual_information(15.0, 1.0).unwrap().0;
        assert!((two - 2.0).abs() < 1e-15);
    }

    #[test]
    fn mutual_information_rejects_bad_noise() {
        assert!(gaussian_mutual_information(1.0, 0.0).is_err());
        assert!(gaussian_mutual_information(1.0, -1.0).is_err());
        assert!(gaussian_mutual_information(-1.0, 1.0).is_err());
    }

    #[test]
    fn reproducible_sample_streams() {
        let mut a = SimRng::new(99);
        let mut b = SimRng::new(99);
        for _ in 0..100_000 {
            assert_eq!(
                sample_gaussian(0.0, 2.5, &mut a).unwrap(),
                sample_gaussian(0.0, 2.5, &mut b).unwrap()
            );
        }
    }
}
