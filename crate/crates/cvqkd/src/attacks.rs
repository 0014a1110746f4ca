//! Eavesdropping channel models: intercept-and-resend and the asymmetric
//! Gaussian cloner, with the exact per-quadrature error variances.
//!
//! The cloner copies are described through their added noise only. The
//! marginals are fixed by the no-cloning products; the joint Bob-Eve
//! statistics are modeled as a shared intrinsic fluctuation plus independent
//! cloning errors, which reproduces every pairwise variance and mutual
//! information in scope (joint statistics beyond that are model-dependent).

use crate::error::{Error, Result};
use crate::gaussian::sample_gaussian;
use crate::protocol::{Basis, ProtocolParams, StateSpec};
use crate::rng::SimRng;

/// Channel/eavesdropper model for a simulation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttackModel {
    NoAttack,
    /// Eve measures a random quadrature each round and resends a fresh
    /// squeezed state centered on her outcome.
    InterceptResend,
    /// Asymmetric Gaussian cloner. `chi` balances Bob's vs Eve's errors
    /// (chi -> 0: Bob unaffected; chi = 1: symmetric). `g` balances the
    /// errors between quadratures 1 and 2.
    Cloner { chi: f64, g: f64 },
}

/// Added error variances of the cloner copies, per quadrature and party.
///
/// Saturates both no-cloning inequalities:
/// `s1_bob * s2_eve = s2_bob * s1_eve = 1/16`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloneNoise {
    pub s1_bob: f64,
    pub s2_bob: f64,
    pub s1_eve: f64,
    pub s2_eve: f64,
}

impl CloneNoise {
    pub fn bob(&self, basis: Basis) -> f64 {
        match basis {
            Basis::X1 => self.s1_bob,
            Basis::X2 => self.s2_bob,
        }
    }

    pub fn eve(&self, basis: Basis) -> f64 {
        match basis {
            Basis::X1 => self.s1_eve,
            Basis::X2 => self.s2_eve,
        }
    }
}

/// Error variances of the saturating cloner family:
///
/// ```text
/// s1_bob = chi g   sigma1^2 / alpha      s1_eve = g / chi   sigma1^2 / alpha
/// s2_bob = chi / g sigma2^2 / alpha      s2_eve = 1/(chi g) sigma2^2 / alpha
/// ```
///
/// so that `s_bob / s_eve = chi^2` in both quadratures and both cross
/// products equal `sigma1^2 sigma2^2 / alpha^2 = 1/16`.
pub fn cloner_noise(params: &ProtocolParams, chi: f64, g: f64) -> Result<CloneNoise> {
    if !chi.is_finite() || chi <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "cloner balance chi must be finite and > 0, got {chi}"
        )));
    }
    if !g.is_finite() || g <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "cloner quadrature balance g must be finite and > 0, got {g}"
        )));
    }
    let a = params.alpha;
    Ok(CloneNoise {
        s1_bob: chi * g * params.sigma1_sq / a,
        s2_bob: chi / g * params.sigma2_sq / a,
        s1_eve: g / chi * params.sigma1_sq / a,
        s2_eve: params.sigma2_sq / (chi * g * a),
    })
}

/// Cloner outcomes for a matched-basis round (both parties wait for the
/// basis disclosure and measure the sent quadrature).
///
/// `y_bob = x + e0 + e_bob`, `y_eve = x + e0 + e_eve` with a shared
/// intrinsic fluctuation `e0 ~ N(0, sigma_i^2)` and independent cloning
/// errors, so `Var(y_bob - x) = sigma_i^2 + s_i_bob` and
/// `Var(y_eve - x) = sigma_i^2 + s_i_eve`.
pub fn apply_cloner(
    x: f64,
    sent_basis: Basis,
    params: &ProtocolParams,
    noise: &CloneNoise,
    rng: &mut SimRng,
) -> Result<(f64, f64)> {
    let intrinsic = sample_gaussian(0.0, params.sigma_sq(sent_basis), rng)?;
    let e_bob = sample_gaussian(0.0, noise.bob(sent_basis), rng)?;
    let e_eve = sample_gaussian(0.0, noise.eve(sent_basis), rng)?;
    Ok((x + intrinsic + e_bob, x + intrinsic + e_eve))
}

/// Bob's outcome on his cloner copy when he measured the wrong quadrature
/// (the round is discarded at sifting; this only keeps per-round logs
/// complete). The copy's measured quadrature carries the anti-squeezed
/// variance of the sent state plus Bob's cloning error in that quadrature.
pub fn cloner_mismatched_outcome(
    sent_state: &StateSpec,
    bob_basis: Basis,
    noise: &CloneNoise,
    rng: &mut SimRng,
) -> Result<f64> {
    sample_gaussian(
        0.0,
        sent_state.anti_squeezed_var() + noise.bob(bob_basis),
        rng,
    )
}

/// Everything produced by one intercept-and-resend round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterceptResendRound {
    pub eve_basis: Basis,
    pub eve_outcome: f64,
    /// The fresh squeezed state Eve injects: squeezed in her measurement
    /// basis, centered on her outcome, with vacuum statistics in the
    /// conjugate quadrature.
    pub resent: StateSpec,
}

/// Eve measures a uniformly random quadrature and resends.
///
/// Right guess: her outcome is N(x, sigma_i^2). Wrong guess: she reads the
/// anti-squeezed quadrature, N(0, 1/(16 sigma_i^2)), independent of x.
pub fn intercept_resend_channel(
    x: f64,
    sent_basis: Basis,
    params: &ProtocolParams,
    rng: &mut SimRng,
) -> Result<InterceptResendRound> {
    let eve_basis = Basis::random(rng);
    let sent_state = StateSpec {
        basis: sent_basis,
        mean: x,
        squeezed_var: params.sigma_sq(sent_basis),
    };
    let eve_outcome = if eve_basis == sent_basis {
        sample_gaussian(x, sent_state.squeezed_var, rng)?
    } else {
        sample_gaussian(0.0, sent_state.anti_squeezed_var(), rng)?
    };
    Ok(InterceptResendRound {
        eve_basis,
        eve_outcome,
        resent: StateSpec {
            basis: eve_basis,
            mean: eve_outcome,
            squeezed_var: params.sigma_sq(eve_basis),
        },
    })
}

/// Intercept-and-resend with Bob measuring the sent basis (the sifted case).
///
/// Right-guess branch: y_bob ~ N(x, 2 sigma^2) — Eve's measurement noise and
/// the fresh state's fluctuation both add. Wrong-guess branch: Bob reads the
/// anti-squeezed quadrature of Eve's state, y_bob ~ N(0, 1/(16 sigma_eve^2)),
/// independent of x.
pub fn intercept_resend(
    x: f64,
    sent_basis: Basis,
    params: &ProtocolParams,
    rng: &mut SimRng,
) -> Result<(f64, Basis, f64)> {
    let round = intercept_resend_channel(x, sent_basis, params, rng)?;
    let y_bob = crate::protocol::bob_measure(&round.resent, sent_basis, 0.0, rng)?;
    Ok((y_bob, round.eve_basis, round.eve_outcome))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::sample_mean_variance;

    fn reference() -> ProtocolParams {
        ProtocolParams::symmetric(std::f64::consts::LN_2 / 2.0).unwrap()
    }

    #[test]
    fn symmetric_cloner_noise_values() {
        let p = reference();
        let n = cloner_noise(&p, 1.0, 1.0).unwrap();
        // (1/8) / (1/2) = 1/4 in every slot
        for s in [n.s1_bob, n.s2_bob, n.s1_eve, n.s2_eve] {
            assert!((s - 0.25).abs() < 1e-15);
        }
        assert!((n.s1_bob * n.s2_eve - 0.0625).abs() < 1e-15);
        assert!((n.s2_bob * n.s1_eve - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn no_cloning_products_saturate_for_any_parameters() {
        for (r1, r2) in [(0.2, 0.9), (0.3466, 0.3466), (1.1, 0.4)] {
            let p = ProtocolParams::derive(r1, r2).unwrap();
            for chi in [0.01, 0.3, 1.0, 3.0, 100.0] {
                for g in [0.1, 1.0, 10.0] {
                    let n = cloner_noise(&p, chi, g).unwrap();
                    assert!(
                        (n.s1_bob * n.s2_eve - 1.0 / 16.0).abs() < 1e-12,
                        "s1B*s2E at chi={chi} g={g}"
                    );
                    assert!(
                        (n.s2_bob * n.s1_eve - 1.0 / 16.0).abs() < 1e-12,
                        "s2B*s1E at chi={chi} g={g}"
                    );
                    // chi is the Bob/Eve error-standard-deviation ratio
                    assert!((n.s1_bob / n.s1_eve - chi * chi).abs() < 1e-9 * chi * chi);
                    assert!((n.s2_bob / n.s2_eve - chi * chi).abs() < 1e-9 * chi * chi);
                }
            }
        }
    }

    #[test]
    fn weak_cloning_leaves_bob_untouched() {
        let p = reference();
        let n = cloner_noise(&p, 1e-9, 1.0).unwrap();
        assert!(n.s1_bob < 1e-9);
        assert!(n.s2_bob < 1e-9);
    }

    #[test]
    fn invalid_cloner_parameters_rejected() {
        let p = reference();
        assert!(cloner_noise(&p, 0.0, 1.0).is_err());
        assert!(cloner_noise(&p, 1.0, -2.0).is_err());
        assert!(cloner_noise(&p, f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn cloner_marginals_match_noise_budget() {
        let p = reference();
        let noise = cloner_noise(&p, 1.0, 1.0).unwrap();
        let mut rng = SimRng::new(606);
        let n = 1_000_000;
        let mut db = Vec::with_capacity(n);
        let mut de = Vec::with_capacity(n);
        let mut rng_x = rng.substream(1);
        for _ in 0..n {
            let x = sample_gaussian(0.0, p.key_var1, &mut rng_x).unwrap();
            let (yb, ye) = apply_cloner(x, Basis::X1, &p, &noise, &mut rng).unwrap();
            db.push(yb - x);
            de.push(ye - x);
        }
        let (_, vb) = sample_mean_variance(&db).unwrap();
        let (_, ve) = sample_mean_variance(&de).unwrap();
        // sigma^2 + s = 0.125 + 0.25 in both marginals
        assert!((vb - 0.375).abs() < 0.0075, "bob {vb}");
        assert!((ve - 0.375).abs() < 0.0075, "eve {ve}");
    }

    #[test]
    fn vanishing_chi_recovers_untapped_noise() {
        let p = reference();
        let noise = cloner_noise(&p, 1e-6, 1.0).unwrap();
        let mut rng = SimRng::new(607);
        let n = 1_000_000;
        let mut db = Vec::with_capacity(n);
        for _ in 0..n {
            let (yb, _) = apply_cloner(0.3, Basis::X1, &p, &noise, &mut rng).unwrap();
            db.push(yb - 0.3);
        }
        let (_, vb) = sample_mean_variance(&db).unwrap();
        assert!((vb - 0.125).abs() < 0.0025, "bob noise {vb}");
    }

    #[test]
    fn intercept_resend_right_guess_doubles_variance() {
        let p = reference();
        let mut rng = SimRng::new(913);
        let mut rng_x = rng.substream(1);
        let n = 1_000_000;
        let mut right = Vec::new();
        let mut guesses = 0usize;
        for _ in 0..n {
            let x = sample_gaussian(0.0, p.key_var1, &mut rng_x).unwrap();
            let (yb, eve_basis, _) = intercept_resend(x, Basis::X1, &p, &mut rng).unwrap();
            if eve_basis == Basis::X1 {
                right.push(yb - x);
                guesses += 1;
            }
        }
        let frac = guesses as f64 / n as f64;
        assert!((frac - 0.5).abs() < 0.005, "right-guess frequency {frac}");
        let (_, var) = sample_mean_variance(&right).unwrap();
        assert!((var - 0.25).abs() < 0.005, "right-guess variance {var}");
    }

    #[test]
    fn intercept_resend_wrong_guess_decorrelates_bob() {
        let p = reference();
        let mut rng = SimRng::new(914);
        let mut rng_x = rng.substream(1);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for _ in 0..200_000 {
            let x = sample_gaussian(0.0, p.key_var1, &mut rng_x).unwrap();
            let (yb, eve_basis, _) = intercept_resend(x, Basis::X1, &p, &mut rng).unwrap();
            if eve_basis == Basis::X2 {
                xs.push(x);
                ys.push(yb);
            }
        }
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let cov: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (x - mx) * (y - my))
            .sum::<f64>()
            / (n - 1.0);
        let (_, vx) = sample_mean_variance(&xs).unwrap();
        let (_, vy) = sample_mean_variance(&ys).unwrap();
        let corr = cov / (vx * vy).sqrt();
        // 3-sigma band around zero correlation
        assert!(corr.abs() < 3.0 / n.sqrt() + 0.005, "correlation {corr}");
        // wrong-guess outcomes carry the anti-squeezed variance of Eve's state
        assert!((vy - 0.5).abs() < 0.01, "wrong-guess variance {vy}");
    }

    #[test]
    fn intercept_resend_difference_variance_mixture() {
        // Mixture over Eve's guess: (1/2) 2 sigma^2 + (1/2) (1/(16 sigma^2) + key_var)
        // = sigma^2 + 1/(32 sigma^2) + key_var/2 = 0.5625 at the reference point.
        let p = reference();
        let mut rng = SimRng::new(915);
        let mut rng_x = rng.substream(1);
        let n = 1_000_000;
        let mut diffs = Vec::with_capacity(n);
        for _ in 0..n {
            let x = sample_gaussian(0.0, p.key_var1, &mut rng_x).unwrap();
            let (yb, _, _) = intercept_resend(x, Basis::X1, &p, &mut rng).unwrap();
            diffs.push(yb - x);
        }
        let (_, var) = sample_mean_variance(&diffs).unwrap();
        assert!((var - 0.5625).abs() < 0.0169, "difference variance {var}");
    }
}
