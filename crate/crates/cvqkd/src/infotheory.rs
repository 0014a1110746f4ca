//! Closed-form information rates: the no-eavesdropper rate, the cloner
//! information split between Bob and Eve, photon budgets, the secret-key
//! bound, and the SNR security threshold.
//!
//! The cloner split in both bases is one function of a single combined
//! balance `u`:
//!
//! ```text
//! F(u) = (1/2) log2( (1 + alpha u) / (alpha^2 + alpha u) )
//! ```
//!
//! Bob's rate in basis 1 is `F(chi g)` and in basis 2 `F(chi / g)`; Eve's
//! rates are the same expressions with `chi -> 1/chi`. `F(u) + F(1/u)`
//! telescopes to `-log2(alpha)`, which is the conservation law pairing
//! Bob's defect in one quadrature with Eve's gain in the other.

use crate::error::{Error, Result};
use crate::gaussian::Bits;
use crate::protocol::{Basis, ProtocolParams};

fn check_balance(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "{name} must be finite and > 0, got {v}"
        )));
    }
    Ok(())
}

/// The combined-balance rate function F described in the module docs.
/// `u = 0` means an untouched channel (full rate); `u -> inf` means a copy
/// that is pure noise (zero rate).
fn balance_rate(params: &ProtocolParams, u: f64) -> Bits {
    if u == 0.0 {
        return params.i0;
    }
    if u.is_infinite() {
        return Bits(0.0);
    }
    let a = params.alpha;
    Bits(0.5 * ((1.0 + a * u) / (a * a + a * u)).log2())
}

/// Combined balance seen by Bob in a basis: `chi g` in basis 1, `chi / g`
/// in basis 2.
fn bob_balance(chi: f64, g: f64, basis: Basis) -> f64 {
    match basis {
        Basis::X1 => chi * g,
        Basis::X2 => chi / g,
    }
}

/// Information rate with no eavesdropper and a perfect channel:
/// `-log2(alpha) = (r1 + r2) / ln 2` bits per pulse.
pub fn info_rate_no_eve(params: &ProtocolParams) -> Bits {
    params.i0
}

/// Bob's rate through the cloner in the given basis.
pub fn info_bob(params: &ProtocolParams, chi: f64, g: f64, basis: Basis) -> Result<Bits> {
    check_balance("chi", chi)?;
    check_balance("g", g)?;
    Ok(balance_rate(params, bob_balance(chi, g, basis)))
}

/// Eve's rate from her cloner copy in the given basis. Equals
/// `info_bob` with the balance inverted (`chi -> 1/chi`).
pub fn info_eve(params: &ProtocolParams, chi: f64, g: f64, basis: Basis) -> Result<Bits> {
    check_balance("chi", chi)?;
    check_balance("g", g)?;
    Ok(balance_rate(params, bob_balance(1.0 / chi, g, basis)))
}

/// Mean photon number of one encoded key state: displacement energy plus
/// squeezing energy, `N = x^2 + sinh^2 r`.
pub fn photon_number(x: f64, r: f64) -> f64 {
    x * x + r.sinh() * r.sinh()
}

/// Average photons per key pulse for symmetric squeezing:
/// `(1 - alpha) / (2 alpha) = (e^{2r} - 1)/2 = (sqrt(1 + gamma) - 1)/2`.
pub fn mean_photon_number(params: &ProtocolParams) -> Result<f64> {
    if !params.is_symmetric() {
        return Err(Error::UnsupportedParameters(format!(
            "mean photon budget is defined for symmetric squeezing; got r1 = {}, r2 = {}",
            params.r1, params.r2
        )));
    }
    Ok((1.0 - params.alpha) / (2.0 * params.alpha))
}

/// Processed information as a function of the photon budget:
/// `log2(2 <N> + 1)` bits.
pub fn capacity_from_photons(mean_n: f64) -> Result<Bits> {
    if !mean_n.is_finite() || mean_n < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "mean photon number must be finite and >= 0, got {mean_n}"
        )));
    }
    Ok(Bits((2.0 * mean_n + 1.0).log2()))
}

/// Achievable secret-key rate lower bound, `I_bob - I_eve` bits/symbol.
/// Returned as-is: a negative value signals insecurity and is diagnostic.
pub fn key_rate_bound(i_bob: Bits, i_eve: Bits) -> Result<Bits> {
    if i_bob.0 < 0.0 || i_eve.0 < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "mutual informations must be >= 0, got i_bob = {}, i_eve = {}",
            i_bob.0, i_eve.0
        )));
    }
    Ok(i_bob - i_eve)
}

/// Minimum SNR Bob must measure for the key rate to stay positive:
/// `gamma' > sqrt(1 + gamma) - 1`.
pub fn snr_security_threshold(gamma: f64) -> Result<f64> {
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "gamma must be finite and > 0, got {gamma}"
        )));
    }
    Ok((1.0 + gamma).sqrt() - 1.0)
}

/// Factor by which a full intercept-and-resend attack reduces the SNR
/// computed from the conditional-variance mixture: `2 / (3 + gamma)`.
pub fn snr_reduction_intercept_resend(gamma: f64) -> Result<f64> {
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "gamma must be finite and > 0, got {gamma}"
        )));
    }
    Ok(2.0 / (3.0 + gamma))
}

/// Noise variance of the (y - x) differences under full interception, in
/// the given encoding basis: the equal mixture of the right-guess branch
/// (2 sigma_i^2) and the wrong-guess branch, where Bob's outcome is
/// independent of x so the key variance itself enters.
pub fn intercept_resend_difference_variance(params: &ProtocolParams, basis: Basis) -> f64 {
    let sigma_sq = params.sigma_sq(basis);
    let eve_wrong = params.sigma_sq(basis.conjugate());
    0.5 * (2.0 * sigma_sq) + 0.5 * (1.0 / (16.0 * eve_wrong) + params.key_var(basis))
}

/// Analytic and inferred information quantities for one scenario.
///
/// `i_bob` and `i_eve` are cross-basis paired (Bob in basis i, Eve in the
/// conjugate basis), so `i_bob + i_eve = i0` holds exactly for cloner
/// reports. `key_rate_bound` is their difference and `secure` its sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoReport {
    pub i0: Bits,
    pub i_bob: Bits,
    pub i_eve: Bits,
    pub key_rate_bound: Bits,
    pub secure: bool,
    /// SNR Bob must exceed for a positive rate.
    pub snr_threshold: f64,
}

impl InfoReport {
    fn from_split(params: &ProtocolParams, i_bob: Bits, i_eve: Bits) -> Result<InfoReport> {
        let bound = key_rate_bound(i_bob, i_eve)?;
        Ok(InfoReport {
            i0: params.i0,
            i_bob,
            i_eve,
            key_rate_bound: bound,
            secure: bound.0 > 0.0,
            snr_threshold: snr_security_threshold(params.gamma)?,
        })
    }

    /// Untapped channel: Bob gets everything.
    pub fn no_attack(params: &ProtocolParams) -> Result<InfoReport> {
        Self::from_split(params, params.i0, Bits(0.0))
    }

    /// Cloner attack, pairing Bob's basis with Eve's conjugate copy.
    pub fn cloner(params: &ProtocolParams, chi: f64, g: f64, bob_basis: Basis) -> Result<InfoReport> {
        let i_bob = info_bob(params, chi, g, bob_basis)?;
        let i_eve = info_eve(params, chi, g, bob_basis.conjugate())?;
        Self::from_split(params, i_bob, i_eve)
    }

    /// Full intercept-and-resend. Bob's rate is the Gaussian bound on his
    /// measured difference-variance SNR (worst basis); Eve learns the basis
    /// after her measurement, so her rate is exactly i0/2 (full rate on
    /// right guesses, nothing on wrong ones).
    pub fn intercept_resend(params: &ProtocolParams) -> Result<InfoReport> {
        let mut i_bob = f64::INFINITY;
        for basis in [Basis::X1, Basis::X2] {
            let noise = intercept_resend_difference_variance(params, basis);
            let snr = params.key_var(basis) / noise;
            i_bob = i_bob.min(0.5 * (1.0 + snr).log2());
        }
        Self::from_split(params, Bits(i_bob), Bits(0.5 * params.i0.0))
    }
}

/// Recover the cloner balance Bob's measured noise corresponds to.
///
/// Under the saturating cloner, Bob's difference variance in basis i is
/// `sigma_i^2 (1 + u/alpha)` with `u = chi g` (basis 1) or `chi/g`
/// (basis 2); invert for u. Measured noise at or below the intrinsic
/// level clamps to `u = 0` (no inferred eavesdropping).
pub fn infer_cloner_balance(
    params: &ProtocolParams,
    measured_noise_var: f64,
    basis: Basis,
) -> Result<f64> {
    if !measured_noise_var.is_finite() || measured_noise_var <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "measured noise variance must be finite and > 0, got {measured_noise_var}"
        )));
    }
    let ratio = measured_noise_var / params.sigma_sq(basis);
    Ok(params.alpha * (ratio - 1.0).max(0.0))
}

/// Eve's paired rate for a given Bob-side balance: `F(1/u)`, the exact
/// complement of Bob's `F(u)` under the conservation law.
pub fn eve_info_from_balance(params: &ProtocolParams, u: f64) -> Bits {
    if u == 0.0 {
        return Bits(0.0);
    }
    balance_rate(params, 1.0 / u)
}

/// Bob's rate for a given balance, `F(u)`.
pub fn bob_info_from_balance(params: &ProtocolParams, u: f64) -> Bits {
    balance_rate(params, u)
}
