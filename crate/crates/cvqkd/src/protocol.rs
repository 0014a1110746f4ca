//! Protocol parameters, Alice's encoding, Bob's homodyne measurement,
//! sifting, and disturbance estimation from a publicly disclosed subset.
//!
//! States are represented purely by their Gaussian measurement statistics
//! (basis, mean, quadrature variances): every quantity in scope is a first
//! or second moment, so no Hilbert-space machinery is needed.

use crate::error::{Error, Result};
use crate::gaussian::{sample_gaussian, sample_mean_variance, Bits};
use crate::rng::SimRng;
use std::fmt;

/// Which quadrature a state is squeezed/displaced in, or measured along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    X1,
    X2,
}

impl Basis {
    pub fn conjugate(self) -> Basis {
        match self {
            Basis::X1 => Basis::X2,
            Basis::X2 => Basis::X1,
        }
    }

    /// Uniform basis choice.
    pub fn random(rng: &mut SimRng) -> Basis {
        if rng.next_bool() {
            Basis::X1
        } else {
            Basis::X2
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::X1 => write!(f, "1"),
            Basis::X2 => write!(f, "2"),
        }
    }
}

/// Derived protocol constants for a squeeze-parameter pair (r1, r2).
///
/// Invariants established by construction:
/// * `sigma_i^2 = (1/4) e^(-2 r_i) < 1/4`
/// * `key_var_i + sigma_i^2 = 1/(16 sigma_j^2)` (indistinguishability)
/// * `1 + key_var_i / sigma_i^2 = 1/alpha^2` with `alpha = 4 sigma1 sigma2`
/// * `gamma = e^(2(r1+r2)) - 1`, identical in both bases
/// * `i0 = -log2(alpha)`
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolParams {
    pub r1: f64,
    pub r2: f64,
    /// Intrinsic squeezed variance of X1 in type-1 states.
    pub sigma1_sq: f64,
    /// Intrinsic squeezed variance of X2 in type-2 states.
    pub sigma2_sq: f64,
    /// Variance of the Gaussian key displacement in basis 1.
    pub key_var1: f64,
    /// Variance of the Gaussian key displacement in basis 2.
    pub key_var2: f64,
    /// alpha = 4 sigma1 sigma2 = e^(-(r1+r2)), in (0, 1).
    pub alpha: f64,
    /// Common signal-to-noise ratio key_var_i / sigma_i^2.
    pub gamma: f64,
    /// No-eavesdropper information rate per pulse.
    pub i0: Bits,
}

impl ProtocolParams {
    /// Derive all protocol constants from the two squeeze parameters.
    pub fn derive(r1: f64, r2: f64) -> Result<Self> {
        if !r1.is_finite() || !r2.is_finite() || r1 <= 0.0 || r2 <= 0.0 {
            return Err(Error::UnusableParameters(format!(
                "squeeze parameters must be > 0 (alpha = e^-(r1+r2) >= 1 carries no \
                 information); got r1 = {r1}, r2 = {r2}"
            )));
        }
        let sigma1_sq = 0.25 * (-2.0 * r1).exp();
        let sigma2_sq = 0.25 * (-2.0 * r2).exp();
        let key_var1 = 1.0 / (16.0 * sigma2_sq) - sigma1_sq;
        let key_var2 = 1.0 / (16.0 * sigma1_sq) - sigma2_sq;
        let s = r1 + r2;
        let alpha = (-s).exp();
        let gamma = (2.0 * s).exp_m1();
        let i0 = Bits(s / std::f64::consts::LN_2);
        Ok(Self {
            r1,
            r2,
            sigma1_sq,
            sigma2_sq,
            key_var1,
            key_var2,
            alpha,
            gamma,
            i0,
        })
    }

    /// Symmetric protocol: the same squeezing on both quadratures, so
    /// `sigma^2 = (1/4) e^(-2r)`, `key_var = (1/2) sinh(2r)` and
    /// `1 + gamma = e^(4r)`.
    pub fn symmetric(r: f64) -> Result<Self> {
        if !r.is_finite() || r <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "squeeze parameter must be > 0, got {r}"
            )));
        }
        Self::derive(r, r)
    }

    pub fn is_symmetric(&self) -> bool {
        (self.r1 - self.r2).abs() <= 1e-12 * self.r1.max(self.r2)
    }

    /// Intrinsic squeezed variance in the given basis.
    pub fn sigma_sq(&self, basis: Basis) -> f64 {
        match basis {
            Basis::X1 => self.sigma1_sq,
            Basis::X2 => self.sigma2_sq,
        }
    }

    /// Key (displacement) variance in the given basis.
    pub fn key_var(&self, basis: Basis) -> f64 {
        match basis {
            Basis::X1 => self.key_var1,
            Basis::X2 => self.key_var2,
        }
    }
}

/// Gaussian description of a transmitted state: squeezed (variance
/// `squeezed_var`) and displaced (mean `mean`) along `basis`; the conjugate
/// quadrature is anti-squeezed at `1/(16 squeezed_var)` around zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSpec {
    pub basis: Basis,
    pub mean: f64,
    pub squeezed_var: f64,
}

impl StateSpec {
    /// Variance of the conjugate (anti-squeezed) quadrature, forced by the
    /// minimum-uncertainty product sigma1 sigma2 = 1/4.
    pub fn anti_squeezed_var(&self) -> f64 {
        1.0 / (16.0 * self.squeezed_var)
    }
}

/// One protocol round as seen by the simulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionRecord {
    pub sent_basis: Basis,
    /// Alice's key value (the displacement she applied).
    pub x: f64,
    pub bob_basis: Basis,
    /// Bob's homodyne outcome in his basis.
    pub y: f64,
    /// Present iff an attack with a measurement occurred.
    pub eve_basis: Option<Basis>,
    pub eve_outcome: Option<f64>,
}

/// Alice draws a key value x ~ N(0, key_var) and prepares the matching
/// displaced squeezed state. Returns (x, state).
pub fn alice_encode(
    params: &ProtocolParams,
    basis: Basis,
    rng: &mut SimRng,
) -> Result<(f64, StateSpec)> {
    let x = sample_gaussian(0.0, params.key_var(basis), rng)?;
    Ok((
        x,
        StateSpec {
            basis,
            mean: x,
            squeezed_var: params.sigma_sq(basis),
        },
    ))
}

/// Bob's homodyne outcome on `state` along `bob_basis`.
///
/// Matched basis: y ~ N(mean, squeezed_var + post_channel_noise).
/// Mismatched basis: y ~ N(0, anti_squeezed_var + post_channel_noise),
/// independent of the displacement.
///
/// `post_channel_noise` is the attack-induced added variance for Bob in the
/// measured basis (0 when the channel is untapped).
pub fn bob_measure(
    state: &StateSpec,
    bob_basis: Basis,
    post_channel_noise: f64,
    rng: &mut SimRng,
) -> Result<f64> {
    if bob_basis == state.basis {
        sample_gaussian(state.mean, state.squeezed_var + post_channel_noise, rng)
    } else {
        sample_gaussian(0.0, state.anti_squeezed_var() + post_channel_noise, rng)
    }
}

/// Keep only rounds where Bob happened to measure the encoding basis.
/// Pure, order-preserving filter.
pub fn sift(records: &[TransmissionRecord]) -> Vec<(f64, f64)> {
    records
        .iter()
        .filter(|r| r.sent_basis == r.bob_basis)
        .map(|r| (r.x, r.y))
        .collect()
}

/// Disturbance estimate from publicly disclosed (x, y) pairs of one basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisturbanceEstimate {
    /// Unbiased sample variance of the differences y - x.
    pub noise_var: f64,
    /// key_var / noise_var; +infinity when the estimated noise is zero.
    pub snr: f64,
    /// Set when the estimate is too good to be physical (zero noise): the
    /// intrinsic squeezed fluctuations guarantee noise_var > 0 on a real
    /// channel, so an exact match means the data is synthetic or replayed.
    pub suspicious: bool,
}

/// Estimate channel noise from disclosed matched-basis pairs.
///
/// Alice reveals the exact x values of a random subset; Bob compares them
/// with his outcomes y and computes the distribution of the differences.
/// The SNR uses the analytic key variance (Alice knows her own key
/// distribution exactly) for the disclosed basis.
pub fn estimate_disturbance(
    disclosed: &[(f64, f64)],
    params: &ProtocolParams,
    basis: Basis,
) -> Result<DisturbanceEstimate> {
    if disclosed.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "disturbance estimation needs >= 2 disclosed pairs, got {}",
            disclosed.len()
        )));
    }
    let diffs: Vec<f64> = disclosed.iter().map(|(x, y)| y - x).collect();
    let (_, noise_var) = sample_mean_variance(&diffs)?;
    let signal = params.key_var(basis);
    if noise_var == 0.0 {
        return Ok(DisturbanceEstimate {
            noise_var: 0.0,
            snr: f64::INFINITY,
            suspicious: true,
        });
    }
    Ok(DisturbanceEstimate {
        noise_var,
        snr: signal / noise_var,
        suspicious: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2_HALF: f64 = std::f64::consts::LN_2 / 2.0;

    fn reference() -> ProtocolParams {
        ProtocolParams::symmetric(LN2_HALF).unwrap()
    }

    #[test]
    fn reference_params_match_closed_forms() {
        let p = reference();
        assert!((p.sigma1_sq - 0.125).abs() < 1e-15);
        assert!((p.sigma2_sq - 0.125).abs() < 1e-15);
        assert!((p.alpha - 0.5).abs() < 1e-15);
        assert!((p.gamma - 3.0).abs() < 1e-12);
        assert!((p.i0.0 - 1.0).abs() < 1e-15);
        // key_var = 1/(16 * 1/8) - 1/8 = 0.375, cross-checked as sinh(2r)/2
        assert!((p.key_var1 - 0.375).abs() < 1e-15);
        assert!((p.key_var1 - 0.5 * (2.0 * LN2_HALF).sinh()).abs() < 1e-12);
    }

    #[test]
    fn indistinguishability_identities_hold() {
        for (r1, r2) in [(0.2, 0.9), (0.3466, 0.3466), (1.5, 0.05), (2.0, 2.0)] {
            let p = ProtocolParams::derive(r1, r2).unwrap();
            let lhs1 = p.key_var1 + p.sigma1_sq;
            let rhs1 = 1.0 / (16.0 * p.sigma2_sq);
            assert!((lhs1 - rhs1).abs() < 1e-12 * rhs1);
            let lhs2 = p.key_var2 + p.sigma2_sq;
            let rhs2 = 1.0 / (16.0 * p.sigma1_sq);
            assert!((lhs2 - rhs2).abs() < 1e-12 * rhs2);
            // equal SNR in both bases, equal to 1/alpha^2 - 1
            let g1 = p.key_var1 / p.sigma1_sq;
            let g2 = p.key_var2 / p.sigma2_sq;
            assert!((g1 - g2).abs() < 1e-9 * g1.max(1.0));
            assert!((g1 - (1.0 / (p.alpha * p.alpha) - 1.0)).abs() < 1e-9 * g1.max(1.0));
            assert!((p.i0.0 + p.alpha.log2()).abs() < 1e-12);
            assert!(p.sigma1_sq < 0.25 && p.sigma2_sq < 0.25);
        }
    }

    #[test]
    fn symmetric_equals_derive_field_by_field() {
        for r in [0.1, LN2_HALF, 0.9, 2.3] {
            let a = ProtocolParams::symmetric(r).unwrap();
            let b = ProtocolParams::derive(r, r).unwrap();
            assert_eq!(a, b);
            // 1 + gamma = e^(4r) to machine precision
            assert!(((1.0 + a.gamma) - (4.0 * r).exp()).abs() < 1e-12 * (4.0 * r).exp());
        }
    }

    #[test]
    fn vanishing_squeezing_vanishing_information() {
        let p = ProtocolParams::derive(1e-9, 1e-9).unwrap();
        assert!(p.gamma < 1e-8);
        assert!(p.i0.0 < 1e-8);
    }

    #[test]
    fn nonpositive_squeezing_rejected() {
        assert!(matches!(
            ProtocolParams::derive(0.0, 0.5),
            Err(Error::UnusableParameters(_))
        ));
        assert!(matches!(
            ProtocolParams::derive(0.5, -0.1),
            Err(Error::UnusableParameters(_))
        ));
        assert!(matches!(
            ProtocolParams::symmetric(0.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn encode_statistics_match_key_variance() {
        let p = reference();
        let mut rng = SimRng::new(2024);
        let n = 1_000_000;
        let xs: Vec<f64> = (0..n)
            .map(|_| alice_encode(&p, Basis::X1, &mut rng).unwrap().0)
            .collect();
        let (mean, var) = sample_mean_variance(&xs).unwrap();
        assert!((var - 0.375).abs() < 0.00375, "key variance {var}");
        let bound = 5.0 * (0.375f64).sqrt() / (n as f64).sqrt();
        assert!(mean.abs() < bound, "key mean {mean}");
        // state carries the basis-1 squeezed variance
        let (_, state) = alice_encode(&p, Basis::X1, &mut rng).unwrap();
        assert!((state.squeezed_var - 0.125).abs() < 1e-15);
    }

    #[test]
    fn matched_measurement_noise_is_squeezed_variance() {
        let p = reference();
        let mut rng = SimRng::new(77);
        let n = 1_000_000;
        let mut diffs = Vec::with_capacity(n);
        for _ in 0..n {
            let (x, state) = alice_encode(&p, Basis::X2, &mut rng).unwrap();
            let y = bob_measure(&state, Basis::X2, 0.0, &mut rng).unwrap();
            diffs.push(y - x);
        }
        let (_, var) = sample_mean_variance(&diffs).unwrap();
        assert!((var - 0.125).abs() < 0.0025, "matched noise {var}");
    }

    #[test]
    fn mismatched_measurement_has_antisqueezed_variance() {
        let p = reference();
        let mut rng = SimRng::new(78);
        let n = 1_000_000;
        let mut ys = Vec::with_capacity(n);
        for _ in 0..n {
            let (_, state) = alice_encode(&p, Basis::X1, &mut rng).unwrap();
            ys.push(bob_measure(&state, Basis::X2, 0.0, &mut rng).unwrap());
        }
        let (_, var) = sample_mean_variance(&ys).unwrap();
        // 1/(16 sigma^2) = 0.5, which equals key_var + sigma^2
        assert!((var - 0.5).abs() < 0.01, "mismatched variance {var}");
    }

    fn make_records(n: usize, seed: u64, independent_bases: bool) -> Vec<TransmissionRecord> {
        let p = reference();
        let mut rng = SimRng::new(seed);
        (0..n)
            .map(|_| {
                let sent = Basis::random(&mut rng);
                let bob = if independent_bases {
                    Basis::random(&mut rng)
                } else {
                    sent
                };
                let (x, state) = alice_encode(&p, sent, &mut rng).unwrap();
                let y = bob_measure(&state, bob, 0.0, &mut rng).unwrap();
                TransmissionRecord {
                    sent_basis: sent,
                    x,
                    bob_basis: bob,
                    y,
                    eve_basis: None,
                    eve_outcome: None,
                }
            })
            .collect()
    }

    #[test]
    fn sift_keeps_all_matched_rounds() {
        let records = make_records(500, 3, false);
        assert_eq!(sift(&records).len(), 500);
        assert!(sift(&[]).is_empty());
    }

    #[test]
    fn sift_retains_about_half_for_independent_bases() {
        let records = make_records(100_000, 4, true);
        let kept = sift(&records).len() as f64 / 100_000.0;
        assert!((kept - 0.5).abs() < 0.01, "retained fraction {kept}");
    }

    #[test]
    fn sift_preserves_order_and_projects_input() {
        let records = make_records(2_000, 5, true);
        let pairs = sift(&records);
        let mut it = pairs.iter();
        for r in &records {
            if r.sent_basis == r.bob_basis {
                assert_eq!(it.next(), Some(&(r.x, r.y)));
            }
        }
        assert_eq!(it.next(), None);
    }

    #[test]
    fn untapped_channel_estimate_recovers_snr() {
        let p = reference();
        let mut rng = SimRng::new(11);
        let pairs: Vec<(f64, f64)> = (0..100_000)
            .map(|_| {
                let (x, state) = alice_encode(&p, Basis::X1, &mut rng).unwrap();
                let y = bob_measure(&state, Basis::X1, 0.0, &mut rng).unwrap();
                (x, y)
            })
            .collect();
        let est = estimate_disturbance(&pairs, &p, Basis::X1).unwrap();
        assert!((est.noise_var - 0.125).abs() < 0.0025, "noise {}", est.noise_var);
        assert!((est.snr - 3.0).abs() < 0.09, "snr {}", est.snr);
        assert!(!est.suspicious);
    }

    #[test]
    fn exact_echo_is_flagged_suspicious() {
        let p = reference();
        let pairs: Vec<(f64, f64)> = (0..100).map(|i| (i as f64, i as f64)).collect();
        let est = estimate_disturbance(&pairs, &p, Basis::X1).unwrap();
        assert_eq!(est.noise_var, 0.0);
        assert!(est.snr.is_infinite());
        assert!(est.suspicious);
    }

    #[test]
    fn too_few_pairs_is_an_error() {
        let p = reference();
        assert!(matches!(
            estimate_disturbance(&[(0.0, 0.0)], &p, Basis::X1),
            Err(Error::InsufficientData(_))
        ));
    }
}
