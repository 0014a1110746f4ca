//! Discretization of the sifted continuous values: `symbol = floor(n * x)`.
//!
//! The Maurer bound applies once the key and all reconciliation messages
//! are discrete; the integer scale `n` trades quantization loss against
//! symbol entropy.

use super::bits::BitString;
use crate::error::{Error, Result};

/// Largest magnitude accepted for n * value; keeps symbols well inside i32
/// so reconciliation headers can carry the range.
const MAX_SCALED: f64 = 2_147_000_000.0;

/// A quantized symbol string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedKey {
    pub symbols: Vec<i64>,
    /// The floor scale: symbol = floor(quantizer_n * value).
    pub quantizer_n: u32,
    /// Two's-complement width covering the observed min/max symbol.
    pub bits_per_symbol: u32,
}

/// Smallest two's-complement width holding every value in [min, max].
pub fn twos_complement_width(min: i64, max: i64) -> u32 {
    debug_assert!(min <= max);
    for w in 1..64u32 {
        let lo = -(1i64 << (w - 1));
        let hi = (1i64 << (w - 1)) - 1;
        if lo <= min && max <= hi {
            return w;
        }
    }
    64
}

/// Quantize values with `symbol = floor(n * value)`.
pub fn quantize(values: &[f64], n: u32) -> Result<QuantizedKey> {
    if n == 0 {
        return Err(Error::InvalidArgument("quantizer scale n must be >= 1".into()));
    }
    let mut symbols = Vec::with_capacity(values.len());
    for &v in values {
        let scaled = n as f64 * v;
        if !scaled.is_finite() || scaled.abs() > MAX_SCALED {
            return Err(Error::InvalidArgument(format!(
                "value {v} is out of quantizable range at n = {n}"
            )));
        }
        symbols.push(scaled.floor() as i64);
    }
    let (min, max) = symbols
        .iter()
        .fold((0i64, 0i64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    Ok(QuantizedKey {
        bits_per_symbol: twos_complement_width(min.min(0), max.max(0)),
        symbols,
        quantizer_n: n,
    })
}

impl QuantizedKey {
    /// Serialize as `bits_per_symbol`-wide two's-complement words,
    /// LSB-first within each symbol.
    pub fn encode_bits(&self) -> BitString {
        let w = self.bits_per_symbol as usize;
        let mut out = BitString::zeros(self.symbols.len() * w);
        for (i, &s) in self.symbols.iter().enumerate() {
            let u = (s as u64) & (u64::MAX >> (64 - w));
            for p in 0..w {
                if (u >> p) & 1 == 1 {
                    out.set(i * w + p, true);
                }
            }
        }
        out
    }
}

/// Plug-in (empirical frequency) entropy of a symbol string, bits/symbol.
pub fn empirical_symbol_entropy(symbols: &[i64]) -> f64 {
    if symbols.is_empty() {
        return 0.0;
    }
    let mut counts = std::collections::HashMap::new();
    for &s in symbols {
        *counts.entry(s).or_insert(0usize) += 1;
    }
    let n = symbols.len() as f64;
    counts
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}
