//! Privacy amplification: size the final key from the entropy budget and
//! compress the reconciled material with a seeded Toeplitz (universal)
//! hash over GF(2).
//!
//! Sizing uses leftover-hash accounting — the material's entropy minus
//! every disclosed bit minus Eve's inferred information — capped by the
//! asymptotic mutual-information difference, minus a flat security margin.

use super::bits::BitString;
use crate::rng::SimRng;

/// Everything the sizing and hashing steps need.
#[derive(Debug, Clone)]
pub struct AmplifyInputs<'a> {
    /// Reconciled key material (Alice's encoded symbol string).
    pub material: &'a BitString,
    /// Number of key symbols behind the material.
    pub symbols: usize,
    /// Empirical entropy of the symbol string, bits/symbol.
    pub source_entropy_bits_per_symbol: f64,
    /// Measured information rate of the Alice->Bob channel, bits/symbol.
    pub bob_info_bits_per_symbol: f64,
    /// Worst-case inferred eavesdropper information, bits/symbol.
    pub eve_info_bits_per_symbol: f64,
    /// Reconciliation bits disclosed on the public channel.
    pub leakage_bits: usize,
    /// Flat finite-size deduction.
    pub security_margin_bits: usize,
    pub hash_seed: u64,
}

/// Result of privacy amplification. `aborted` is a status, not an error:
/// it means the budget left nothing to extract.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplifyOutcome {
    pub final_key: BitString,
    pub length_bits: usize,
    pub aborted: bool,
    /// Leftover-hash budget before the margin: H(material) - leakage - Eve.
    pub entropy_budget_bits: f64,
    /// Asymptotic cap before the margin: symbols * (I_bob - I_eve).
    pub info_difference_bits: f64,
}

/// Final key length: `min(entropy budget, information difference) - margin`,
/// clamped to [0, material length].
pub fn secret_key_length(inp: &AmplifyInputs) -> usize {
    let outcome = sizing(inp);
    outcome.0
}

fn sizing(inp: &AmplifyInputs) -> (usize, f64, f64) {
    let symbols = inp.symbols as f64;
    let entropy_budget = symbols * inp.source_entropy_bits_per_symbol
        - inp.leakage_bits as f64
        - (symbols * inp.eve_info_bits_per_symbol).ceil();
    let info_difference =
        symbols * (inp.bob_info_bits_per_symbol - inp.eve_info_bits_per_symbol);
    let raw = entropy_budget.min(info_difference).floor() - inp.security_margin_bits as f64;
    let len = if raw.is_finite() && raw > 0.0 {
        (raw as usize).min(inp.material.len())
    } else {
        0
    };
    (len, entropy_budget, info_difference)
}

/// Hash the material down to the secure length with a seeded binary
/// Toeplitz matrix. A zero length yields an empty key and abort status.
pub fn privacy_amplify(inp: &AmplifyInputs) -> AmplifyOutcome {
    let (len, entropy_budget, info_difference) = sizing(inp);
    let final_key = toeplitz_hash(inp.material, len, inp.hash_seed);
    AmplifyOutcome {
        length_bits: final_key.len(),
        aborted: len == 0,
        final_key,
        entropy_budget_bits: entropy_budget,
        info_difference_bits: info_difference,
    }
}

/// out[i] = parity over j of T[i][j] & x[j], with T[i][j] = t[i + j] for a
/// seeded diagonal sequence t of length len(x) + out_len - 1.
pub fn toeplitz_hash(material: &BitString, out_len: usize, seed: u64) -> BitString {
    if out_len == 0 || material.is_empty() {
        return BitString::new();
    }
    let n = material.len();
    let diag_bits = n + out_len - 1;
    let mut rng = SimRng::new(seed);
    // one spare word so every 64-bit window read below stays in bounds
    let diag: Vec<u64> = (0..diag_bits.div_ceil(64) + 1)
        .map(|_| rng.next_u64())
        .collect();
    let x = material.words();
    let x_words = n.div_ceil(64);
    let mut out = BitString::zeros(out_len);
    for i in 0..out_len {
        let mut acc = 0u32;
        let base_word = i / 64;
        let shift = i % 64;
        for (j, &xw) in x.iter().enumerate().take(x_words) {
            let lo = diag[base_word + j] >> shift;
            let window = if shift == 0 {
                lo
            } else {
                lo | (diag[base_word + j + 1] << (64 - shift))
            };
            acc ^= (window & xw).count_ones() & 1;
        }
        if acc == 1 {
            out.set(i, true);
        }
    }
    out
}
