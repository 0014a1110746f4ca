//! End-to-end key distillation: simulate rounds, sift, estimate the
//! disturbance from a disclosed subset, gate on the SNR threshold, then
//! quantize, reconcile and privacy-amplify into a shared discrete key.

pub mod amplify;
pub mod bits;
pub mod quantize;
pub mod reconcile;

pub use amplify::{privacy_amplify, secret_key_length, toeplitz_hash, AmplifyInputs, AmplifyOutcome};
pub use bits::BitString;
pub use quantize::{empirical_symbol_entropy, quantize, QuantizedKey};
pub use reconcile::{reconcile, ReconcileOutcome, Transcript, BASE_OVERHEAD_BITS};

use crate::attacks::{
    apply_cloner, cloner_mismatched_outcome, cloner_noise, intercept_resend_channel, AttackModel,
};
use crate::error::{Error, Result};
use crate::estimation::empirical_mi_gaussian;
use crate::infotheory::{
    eve_info_from_balance, infer_cloner_balance, snr_security_threshold, InfoReport,
};
use crate::protocol::{
    alice_encode, bob_measure, estimate_disturbance, Basis, DisturbanceEstimate, ProtocolParams,
    TransmissionRecord,
};
use crate::rng::SimRng;

/// Tunables of a pipeline run; all randomness flows from `seed`.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub seed: u64,
    /// Fraction of sifted rounds sacrificed to disturbance estimation.
    pub disclose_fraction: f64,
    /// Quantizer scale (symbol = floor(n x)).
    pub quantizer_n: u32,
    /// Flat bits subtracted from the amplified length.
    pub security_margin_bits: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            disclose_fraction: 0.1,
            quantizer_n: 4,
            security_margin_bits: 32,
        }
    }
}

// Substream labels; one logical role per label.
const SUB_ALICE_BASIS: u64 = 0;
const SUB_ALICE_KEY: u64 = 1;
const SUB_CHANNEL: u64 = 2;
const SUB_BOB_BASIS: u64 = 3;
const SUB_BOB_MEASURE: u64 = 4;
const SUB_DISCLOSE: u64 = 5;
const SUB_RECONCILE: u64 = 6;
const SUB_HASH: u64 = 7;

/// Why a run ended without a key.
#[derive(Debug, Clone, PartialEq)]
pub enum AbortReason {
    /// Measured SNR at or below the security threshold.
    SnrBelowThreshold { measured: f64, threshold: f64 },
    /// The entropy/information budget left nothing after leakage and margin.
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PipelineStatus {
    Key,
    Aborted(AbortReason),
}

impl PipelineStatus {
    pub fn is_key(&self) -> bool {
        matches!(self, PipelineStatus::Key)
    }
}

/// Disturbance estimate for one basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisEstimate {
    pub basis: Basis,
    pub disclosed_pairs: usize,
    pub estimate: DisturbanceEstimate,
    /// Cloner balance `u` Bob's noise corresponds to (0 = untouched).
    pub inferred_balance: f64,
}

/// Discrete key material and its accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyMaterial {
    /// Alice's reconciled symbol string, bit-encoded (equals Bob's after
    /// correction).
    pub reconciled_bits: BitString,
    pub leakage_bits: usize,
    /// Worst-case Eve information applied per symbol, bits.
    pub eve_info_estimate: f64,
    pub final_key: BitString,
    pub hash_seed: u64,
}

impl KeyMaterial {
    pub fn final_key_hex(&self) -> String {
        self.final_key.to_hex()
    }

    fn empty(hash_seed: u64, eve_info_estimate: f64) -> Self {
        Self {
            reconciled_bits: BitString::new(),
            leakage_bits: 0,
            eve_info_estimate,
            final_key: BitString::new(),
            hash_seed,
        }
    }
}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub status: PipelineStatus,
    pub records: Vec<TransmissionRecord>,
    /// Per-round flag: sifted and sacrificed to disturbance estimation.
    pub disclosed: Vec<bool>,
    pub sifted_count: usize,
    pub estimates: Vec<BasisEstimate>,
    pub snr_threshold: f64,
    /// Closed-form expectation for the configured attack.
    pub analytic: InfoReport,
    /// Measured Bob rate (worst basis, capped at I0), bits/symbol.
    pub measured_bob_info: f64,
    /// Key symbols carried into distillation.
    pub symbols: usize,
    pub source_entropy_bits_per_symbol: f64,
    pub key: KeyMaterial,
    pub transcript: Option<Transcript>,
    /// Final key bits per key symbol.
    pub net_rate_bits_per_symbol: f64,
}

fn analytic_report(params: &ProtocolParams, attack: AttackModel) -> Result<InfoReport> {
    match attack {
        AttackModel::NoAttack => InfoReport::no_attack(params),
        AttackModel::InterceptResend => InfoReport::intercept_resend(params),
        AttackModel::Cloner { chi, g } => InfoReport::cloner(params, chi, g, Basis::X1),
    }
}

/// Run the full protocol once.
///
/// Stages: encode/attack/measure `rounds` times, sift, estimate per-basis
/// disturbance on a disclosed subset, abort if the measured SNR does not
/// exceed the security threshold, then quantize the remaining pairs,
/// reconcile Bob onto Alice and privacy-amplify. Fixed seeds make the run
/// bit-exactly reproducible.
pub fn run_pipeline(
    params: &ProtocolParams,
    attack: AttackModel,
    rounds: usize,
    cfg: &PipelineConfig,
) -> Result<PipelineOutcome> {
    if !(0.0..1.0).contains(&cfg.disclose_fraction) || cfg.disclose_fraction <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "disclose_fraction must be in (0, 1), got {}",
            cfg.disclose_fraction
        )));
    }
    let root = SimRng::new(cfg.seed);
    let mut rng_alice_basis = root.substream(SUB_ALICE_BASIS);
    let mut rng_alice_key = root.substream(SUB_ALICE_KEY);
    let mut rng_channel = root.substream(SUB_CHANNEL);
    let mut rng_bob_basis = root.substream(SUB_BOB_BASIS);
    let mut rng_bob_measure = root.substream(SUB_BOB_MEASURE);
    let hash_seed = root.substream(SUB_HASH).next_u64();

    let precomputed_noise = match attack {
        AttackModel::Cloner { chi, g } => Some(cloner_noise(params, chi, g)?),
        _ => None,
    };

    let mut records = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let sent = Basis::random(&mut rng_alice_basis);
        let (x, state) = alice_encode(params, sent, &mut rng_alice_key)?;
        let bob_basis = Basis::random(&mut rng_bob_basis);
        let (y, eve_basis, eve_outcome) = match attack {
            AttackModel::NoAttack => (
                bob_measure(&state, bob_basis, 0.0, &mut rng_bob_measure)?,
                None,
                None,
            ),
            AttackModel::InterceptResend => {
                let tap = intercept_resend_channel(x, sent, params, &mut rng_channel)?;
                (
                    bob_measure(&tap.resent, bob_basis, 0.0, &mut rng_bob_measure)?,
                    Some(tap.eve_basis),
                    Some(tap.eve_outcome),
                )
            }
            AttackModel::Cloner { .. } => {
                let noise = precomputed_noise.as_ref().unwrap();
                if bob_basis == sent {
                    let (yb, ye) = apply_cloner(x, sent, params, noise, &mut rng_channel)?;
                    (yb, Some(sent), Some(ye))
                } else {
                    // Both parties wait for the basis disclosure; Eve still
                    // measures the sent quadrature of her copy, Bob's
                    // mismatched outcome is logged and discarded at sifting.
                    let yb =
                        cloner_mismatched_outcome(&state, bob_basis, noise, &mut rng_channel)?;
                    let ye = x
                        + crate::gaussian::sample_gaussian(
                            0.0,
                            params.sigma_sq(sent) + noise.eve(sent),
                            &mut rng_channel,
                        )?;
                    (yb, Some(sent), Some(ye))
                }
            }
        };
        records.push(TransmissionRecord {
            sent_basis: sent,
            x,
            bob_basis,
            y,
            eve_basis,
            eve_outcome,
        });
    }

    // Sift, then sacrifice a fixed-size random subset for estimation.
    let sifted_idx: Vec<usize> = (0..rounds)
        .filter(|&i| records[i].sent_basis == records[i].bob_basis)
        .collect();
    let sifted_count = sifted_idx.len();
    let disclose_count = (cfg.disclose_fraction * sifted_count as f64).floor() as usize;
    let mut rng_disclose = root.substream(SUB_DISCLOSE);
    let mut picker = sifted_idx.clone();
    for i in 0..disclose_count {
        let j = i + rng_disclose.next_below((picker.len() - i) as u64) as usize;
        picker.swap(i, j);
    }
    let mut disclosed = vec![false; rounds];
    for &i in &picker[..disclose_count] {
        disclosed[i] = true;
    }

    let mut estimates = Vec::new();
    let snr_threshold = snr_security_threshold(params.gamma)?;
    let mut measured_bob_info = f64::INFINITY;
    let mut eve_info_estimate = 0.0f64;
    let mut min_snr = f64::INFINITY;
    for basis in [Basis::X1, Basis::X2] {
        let pairs: Vec<(f64, f64)> = picker[..disclose_count]
            .iter()
            .filter(|&&i| records[i].sent_basis == basis)
            .map(|&i| (records[i].x, records[i].y))
            .collect();
        if pairs.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "basis {basis} has {} disclosed pairs; increase rounds or the \
                 disclose fraction",
                pairs.len()
            )));
        }
        let estimate = estimate_disturbance(&pairs, params, basis)?;
        let inferred_balance = if estimate.suspicious {
            0.0
        } else {
            infer_cloner_balance(params, estimate.noise_var, basis)?
        };
        min_snr = min_snr.min(estimate.snr);
        if estimate.snr.is_finite() {
            measured_bob_info =
                measured_bob_info.min(empirical_mi_gaussian(estimate.snr)?.0.min(params.i0.0));
        } else {
            measured_bob_info = measured_bob_info.min(params.i0.0);
        }
        // Bob's balance in basis i bounds Eve's take on the conjugate
        // basis; the worst pairing is applied to every symbol.
        eve_info_estimate = eve_info_estimate.max(eve_info_from_balance(params, inferred_balance).0);
        estimates.push(BasisEstimate {
            basis,
            disclosed_pairs: pairs.len(),
            estimate,
            inferred_balance,
        });
    }

    let analytic = analytic_report(params, attack)?;
    let base = |status: PipelineStatus, key: KeyMaterial| PipelineOutcome {
        status,
        records: Vec::new(),
        disclosed: Vec::new(),
        sifted_count,
        estimates: Vec::new(),
        snr_threshold,
        analytic,
        measured_bob_info,
        symbols: 0,
        source_entropy_bits_per_symbol: 0.0,
        key,
        transcript: None,
        net_rate_bits_per_symbol: 0.0,
    };

    if min_snr <= snr_threshold {
        let mut out = base(
            PipelineStatus::Aborted(AbortReason::SnrBelowThreshold {
                measured: min_snr,
                threshold: snr_threshold,
            }),
            KeyMaterial::empty(hash_seed, eve_info_estimate),
        );
        out.records = records;
        out.disclosed = disclosed;
        out.estimates = estimates;
        return Ok(out);
    }

    // Key material: sifted minus disclosed.
    let key_idx: Vec<usize> = sifted_idx
        .iter()
        .copied()
        .filter(|&i| !disclosed[i])
        .collect();
    let alice_vals: Vec<f64> = key_idx.iter().map(|&i| records[i].x).collect();
    let bob_vals: Vec<f64> = key_idx.iter().map(|&i| records[i].y).collect();
    let alice_q = quantize(&alice_vals, cfg.quantizer_n)?;
    let bob_q = quantize(&bob_vals, cfg.quantizer_n)?;
    let symbols = alice_q.symbols.len();

    let mut rng_reconcile = root.substream(SUB_RECONCILE);
    let rec = reconcile(&alice_q, &bob_q, &mut rng_reconcile)?;
    let source_entropy = empirical_symbol_entropy(&alice_q.symbols);
    let material = alice_q.encode_bits();
    debug_assert_eq!(material, rec.corrected_bob.encode_bits());

    let amplified = privacy_amplify(&AmplifyInputs {
        material: &material,
        symbols,
        source_entropy_bits_per_symbol: source_entropy,
        bob_info_bits_per_symbol: measured_bob_info,
        eve_info_bits_per_symbol: eve_info_estimate,
        leakage_bits: rec.leakage_bits,
        security_margin_bits: cfg.security_margin_bits,
        hash_seed,
    });

    let status = if amplified.aborted {
        PipelineStatus::Aborted(AbortReason::BudgetExhausted)
    } else {
        PipelineStatus::Key
    };
    let net_rate = if symbols > 0 {
        amplified.length_bits as f64 / symbols as f64
    } else {
        0.0
    };
    let mut out = base(
        status,
        KeyMaterial {
            reconciled_bits: material,
            leakage_bits: rec.leakage_bits,
            eve_info_estimate,
            final_key: amplified.final_key,
            hash_seed,
        },
    );
    out.records = records;
    out.disclosed = disclosed;
    out.estimates = estimates;
    out.symbols = symbols;
    out.source_entropy_bits_per_symbol = source_entropy;
    out.transcript = Some(rec.transcript);
    out.net_rate_bits_per_symbol = net_rate;
    Ok(out)
}
