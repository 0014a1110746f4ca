//! Monte Carlo cross-validation of the analytic rates: empirical SNR,
//! Gaussian-assumption mutual information, and the indistinguishability
//! check on measurement ensembles.
//!
//! Every channel in scope is exactly Gaussian, so mutual information is
//! estimated through the closed form on the estimated SNR rather than a
//! generic nonparametric estimator, and indistinguishability reduces to a
//! variance-ratio test on zero-mean ensembles.

use crate::error::{Error, Result};
use crate::gaussian::{sample_mean_variance, Bits};

/// Unbiased noise variance of the differences y - x, and the implied SNR.
/// An exact echo (zero noise) returns `snr = +infinity` as the sentinel.
pub fn empirical_noise_and_snr(pairs: &[(f64, f64)], signal_variance: f64) -> Result<(f64, f64)> {
    if pairs.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need >= 2 pairs, got {}",
            pairs.len()
        )));
    }
    if !signal_variance.is_finite() || signal_variance <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "signal variance must be finite and > 0, got {signal_variance}"
        )));
    }
    let diffs: Vec<f64> = pairs.iter().map(|(x, y)| y - x).collect();
    let (_, noise_var) = sample_mean_variance(&diffs)?;
    let snr = if noise_var == 0.0 {
        f64::INFINITY
    } else {
        signal_variance / noise_var
    };
    Ok((noise_var, snr))
}

/// Gaussian-channel mutual information at an estimated SNR:
/// (1/2) log2(1 + snr). Infinite SNR (the zero-noise sentinel) is rejected;
/// callers must handle that case before asking for a rate.
pub fn empirical_mi_gaussian(snr: f64) -> Result<Bits> {
    if !snr.is_finite() || snr < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "snr must be finite and >= 0, got {snr}"
        )));
    }
    Ok(Bits(0.5 * (1.0 + snr).log2()))
}

/// Two-sided z quantile for the 1% significance level.
const Z_99: f64 = 2.575_829_303_548_900_8;

/// Outcome of the variance-ratio indistinguishability check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndistinguishabilityReport {
    pub var1: f64,
    pub var2: f64,
    /// var1 / var2.
    pub ratio: f64,
    /// Standardized log-ratio; the p-value proxy (|z| ~ N(0,1) under the
    /// null hypothesis of equal variances).
    pub z: f64,
    /// 99% confidence interval for the ratio.
    pub ci99: (f64, f64),
    /// True when the confidence interval contains 1.
    pub passes: bool,
}

/// Compare the outcome variances of two ensembles measured along the same
/// quadrature (one per encoding basis). The protocol is indistinguishable
/// when the ratio's confidence interval contains 1.
///
/// Uses the large-sample normal approximation for the log variance ratio,
/// Var(ln s^2) ~ 2/(n-1); intended for ensembles of 1e4 samples or more.
pub fn indistinguishability_test(
    samples_basis1: &[f64],
    samples_basis2: &[f64],
) -> Result<IndistinguishabilityReport> {
    let (_, var1) = sample_mean_variance(samples_basis1)?;
    let (_, var2) = sample_mean_variance(samples_basis2)?;
    if var1 <= 0.0 || var2 <= 0.0 {
        return Err(Error::InsufficientData(
            "degenerate ensemble: zero sample variance".into(),
        ));
    }
    let ratio = var1 / var2;
    let se = (2.0 / (samples_basis1.len() as f64 - 1.0)
        + 2.0 / (samples_basis2.len() as f64 - 1.0))
        .sqrt();
    let z = ratio.ln() / se;
    let ci99 = (ratio * (-Z_99 * se).exp(), ratio * (Z_99 * se).exp());
    Ok(IndistinguishabilityReport {
        var1,
        var2,
        ratio,
        z,
        ci99,
        passes: ci99.0 <= 1.0 && 1.0 <= ci99.1,
    })
}
