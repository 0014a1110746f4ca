//! Interactive reconciliation: make Bob's symbol string equal Alice's while
//! counting every publicly exchanged bit as leakage.
//!
//! The protocol works plane by plane over the symbols' binary expansion
//! (offset by the disclosed minimum so planes are plain residue bits),
//! least-significant plane first:
//!
//! 1. A fixed random-subset parity audit decides whether anything needs
//!    fixing at all; identical strings cost exactly the audit.
//! 2. Per plane, a small disclosed probe estimates the plane's error rate.
//!    Saturated planes (rate above ~25%, where parity blocks stop paying
//!    for themselves) are disclosed outright; quieter planes run passes of
//!    shuffled parity blocks with binary-search correction, doubling the
//!    block size between passes, until the plane agrees.
//! 3. After each settled plane, Bob re-estimates his remaining symbols:
//!    knowing Alice's low bits, the nearest value congruent to that residue
//!    replaces his raw observation. This collapses most high-plane errors,
//!    which is what keeps the total leakage near the conditional entropy.
//!
//! Both sides drive shuffles, probes and audit subsets from one shared
//! public coin, so the exchange is replayable from the transcript.

use super::bits::BitString;
use super::quantize::QuantizedKey;
use crate::error::{Error, Result};
use crate::rng::SimRng;

/// Bits spent disclosing the symbol range header (two 32-bit extremes).
pub const RANGE_HEADER_BITS: usize = 64;
/// Random-subset parities exchanged per audit.
pub const AUDIT_BITS: usize = 64;
/// Leakage of a run whose opening audit already matches: header + audit.
pub const BASE_OVERHEAD_BITS: usize = RANGE_HEADER_BITS + AUDIT_BITS;

/// Disclosed sample size used to estimate a plane's error rate.
const PROBE_BITS: usize = 64;
/// Planes shorter than this skip the probe (the sample would dominate).
const PROBE_MIN_PLANE: usize = 4 * PROBE_BITS;
/// Above this estimated error rate a parity cascade leaks more than the
/// plane itself; disclose instead.
const DISCLOSE_THRESHOLD: f64 = 0.25;
/// Cascade passes per plane before falling back to full disclosure.
const MAX_PASSES: usize = 16;

/// Message kinds in the reconciliation transcript.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Symbol range extremes (min, max) as two big-endian i32.
    RangeHeader = 1,
    /// Random-subset parities over the whole bit matrix.
    Audit = 2,
    /// Alice's plane bits at the probe positions (positions come from the
    /// shared coin).
    Probe = 3,
    /// A full plane (minus already-probed positions), in index order.
    PlaneDisclose = 4,
    /// One parity bit per block of a shuffled pass.
    BlockParities = 5,
    /// Binary-search parities for one mismatched block.
    SearchParities = 6,
}

impl Stage {
    fn from_tag(tag: u8) -> Option<Stage> {
        match tag {
            1 => Some(Stage::RangeHeader),
            2 => Some(Stage::Audit),
            3 => Some(Stage::Probe),
            4 => Some(Stage::PlaneDisclose),
            5 => Some(Stage::BlockParities),
            6 => Some(Stage::SearchParities),
            _ => None,
        }
    }
}

/// One disclosed message.
///
/// `block_index` carries the message's coordinates: the plane for
/// `Probe`/`PlaneDisclose`, `(plane << 16) | pass` for `BlockParities`, a
/// running counter for `SearchParities`, zero otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub stage: Stage,
    pub block_index: u32,
    pub payload: BitString,
}

/// Ordered log of every disclosure; its total payload size is the leakage.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Transcript {
    pub messages: Vec<Message>,
}

impl Transcript {
    fn push(&mut self, stage: Stage, block_index: u32, payload: BitString) {
        self.messages.push(Message {
            stage,
            block_index,
            payload,
        });
    }

    /// Total disclosed bits.
    pub fn leakage_bits(&self) -> usize {
        self.messages.iter().map(|m| m.payload.len()).sum()
    }

    /// Serialize as length-prefixed binary messages:
    /// `{stage tag: 1 byte, block index: 4-byte BE, payload length in bits:
    /// 4-byte BE, payload bytes}`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for m in &self.messages {
            out.push(m.stage as u8);
            out.extend_from_slice(&m.block_index.to_be_bytes());
            out.extend_from_slice(&(m.payload.len() as u32).to_be_bytes());
            out.extend_from_slice(&m.payload.to_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Transcript> {
        let mut messages = Vec::new();
        let mut at = 0usize;
        while at < bytes.len() {
            if bytes.len() - at < 9 {
                return Err(Error::Malformed("truncated message header".into()));
            }
            let stage = Stage::from_tag(bytes[at])
                .ok_or_else(|| Error::Malformed(format!("unknown stage tag {}", bytes[at])))?;
            let block_index = u32::from_be_bytes(bytes[at + 1..at + 5].try_into().unwrap());
            let bit_len = u32::from_be_bytes(bytes[at + 5..at + 9].try_into().unwrap()) as usize;
            at += 9;
            let byte_len = bit_len.div_ceil(8);
            if bytes.len() - at < byte_len {
                return Err(Error::Malformed("truncated payload".into()));
            }
            let payload = BitString::from_bytes(&bytes[at..at + byte_len], bit_len)
                .ok_or_else(|| Error::Malformed("stray bits past payload length".into()))?;
            at += byte_len;
            messages.push(Message {
                stage,
                block_index,
                payload,
            });
        }
        Ok(Transcript { messages })
    }
}

/// Result of a reconciliation run.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconcileOutcome {
    /// Bob's string after correction; equals Alice's symbols.
    pub corrected_bob: QuantizedKey,
    /// Every publicly exchanged bit.
    pub leakage_bits: usize,
    pub transcript: Transcript,
}

struct Plane {
    bits: BitString,
}

impl Plane {
    fn from_values(values: &[u64], p: u32) -> Plane {
        Plane {
            bits: values.iter().map(|&v| (v >> p) & 1 == 1).collect(),
        }
    }

    fn parity_over(&self, idx: &[u32]) -> bool {
        idx.iter().fold(false, |acc, &i| acc ^ self.bits.get(i as usize))
    }
}

/// Random-subset parity audit over all planes of both strings. Returns
/// Alice's disclosed parities and whether Bob's side matched everywhere.
fn audit(a: &[u64], b: &[u64], width: u32, rng: &mut SimRng) -> (BitString, bool) {
    let n = a.len();
    let words = n.div_ceil(64);
    let mut plane_a = Vec::with_capacity(width as usize);
    let mut plane_diff = Vec::with_capacity(width as usize);
    for p in 0..width {
        let mut wa = vec![0u64; words];
        let mut wd = vec![0u64; words];
        for (i, (&av, &bv)) in a.iter().zip(b).enumerate() {
            let abit = (av >> p) & 1;
            let dbit = abit ^ ((bv >> p) & 1);
            wa[i / 64] |= abit << (i % 64);
            wd[i / 64] |= dbit << (i % 64);
        }
        plane_a.push(wa);
        plane_diff.push(wd);
    }
    let mut parities = BitString::new();
    let mut all_match = true;
    for _ in 0..AUDIT_BITS {
        let mut pa = 0u32;
        let mut pdiff = 0u32;
        for (wa, wd) in plane_a.iter().zip(&plane_diff) {
            for (aw, dw) in wa.iter().zip(wd.iter()) {
                let mask = rng.next_u64();
                pa ^= (aw & mask).count_ones() & 1;
                pdiff ^= (dw & mask).count_ones() & 1;
            }
        }
        parities.push(pa == 1);
        if pdiff == 1 {
            all_match = false;
        }
    }
    (parities, all_match)
}

/// Bob's best guess of a symbol given his raw observation `b`, Alice's
/// residue modulo `m`, and the value range: the candidate congruent to the
/// residue nearest to `b` (ties toward the smaller value).
fn infer_symbol(residue: u64, m: u64, b: u64, span: u64) -> u64 {
    let bi = b as i64;
    let r = residue as i64;
    let mi = m as i64;
    let k = (bi - r).div_euclid(mi);
    let c0 = r + k * mi;
    let c1 = c0 + mi;
    let valid = |c: i64| c >= 0 && c as u64 <= span;
    match (valid(c0), valid(c1)) {
        (true, true) => {
            if bi - c0 <= c1 - bi {
                c0 as u64
            } else {
                c1 as u64
            }
        }
        (true, false) => c0 as u64,
        (false, true) => c1 as u64,
        // residue itself is always in range
        (false, false) => residue,
    }
}

/// Sample `count` distinct indices below `n` from the shared coin.
fn sample_positions(n: usize, count: usize, rng: &mut SimRng) -> Vec<u32> {
    let mut idx: Vec<u32> = (0..n as u32).collect();
    let count = count.min(n);
    for i in 0..count {
        let j = i + rng.next_below((n - i) as u64) as usize;
        idx.swap(i, j);
    }
    idx.truncate(count);
    idx
}

/// Binary-search one mismatched block down to a single differing position.
/// Alice disclosed the block parity already; each halving discloses one
/// more parity of her left half.
fn binary_search_fix(
    alice: &Plane,
    bob: &mut Plane,
    block: &[u32],
    transcript_bits: &mut BitString,
) -> usize {
    let mut lo = 0usize;
    let mut hi = block.len();
    let mut disclosed = 0usize;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let pa = alice.parity_over(&block[lo..mid]);
        transcript_bits.push(pa);
        disclosed += 1;
        let pb = bob.parity_over(&block[lo..mid]);
        if pa != pb {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    bob.bits.flip(block[lo] as usize);
    disclosed
}

/// Reconcile Bob's quantized string against Alice's.
///
/// Preconditions: equal lengths and equal quantizer scales. The shared
/// `rng` is the public coin; it must be seeded identically on both sides
/// (and differently from the key material's randomness).
pub fn reconcile(
    alice: &QuantizedKey,
    bob: &QuantizedKey,
    rng: &mut SimRng,
) -> Result<ReconcileOutcome> {
    if alice.symbols.len() != bob.symbols.len() {
        return Err(Error::LengthMismatch(format!(
            "alice has {} symbols, bob has {}",
            alice.symbols.len(),
            bob.symbols.len()
        )));
    }
    if alice.quantizer_n != bob.quantizer_n {
        return Err(Error::InvalidArgument(format!(
            "quantizer scales differ: {} vs {}",
            alice.quantizer_n, bob.quantizer_n
        )));
    }
    let n = alice.symbols.len();
    let mut transcript = Transcript::default();
    let mut leakage = 0usize;

    // Range header: both parties agree on the offset and plane count.
    let mut min = 0i64;
    let mut max = 0i64;
    for &s in alice.symbols.iter().chain(&bob.symbols) {
        if i64::from(s as i32) != s {
            return Err(Error::InvalidArgument(format!("symbol {s} exceeds the i32 range")));
        }
        min = min.min(s);
        max = max.max(s);
    }
    let mut header = BitString::new();
    for half in [min as i32, max as i32] {
        for bit in (0..32).rev() {
            header.push((half >> bit) & 1 == 1);
        }
    }
    transcript.push(Stage::RangeHeader, 0, header);
    leakage += RANGE_HEADER_BITS;

    let span = (max - min) as u64;
    let width = (64 - span.leading_zeros()).max(1);
    let a: Vec<u64> = alice.symbols.iter().map(|&s| (s - min) as u64).collect();
    let b: Vec<u64> = bob.symbols.iter().map(|&s| (s - min) as u64).collect();

    // Opening audit: identical strings pay only the fixed overhead.
    let (parities, matched) = audit(&a, &b, width, rng);
    transcript.push(Stage::Audit, 0, parities);
    leakage += AUDIT_BITS;
    if matched {
        return Ok(ReconcileOutcome {
            corrected_bob: alice.clone(),
            leakage_bits: leakage,
            transcript,
        });
    }

    let mut residue: Vec<u64> = vec![0; n];
    let mut search_counter: u32 = 0;
    for p in 0..width {
        let alice_plane = Plane::from_values(&a, p);
        let modulus = 1u64 << p; // residue known modulo 2^p entering plane p
        let mut bob_plane = if p == 0 {
            Plane::from_values(&b, 0)
        } else {
            let est: Vec<u64> = (0..n)
                .map(|i| infer_symbol(residue[i], modulus, b[i], span))
                .collect();
            Plane::from_values(&est, p)
        };

        // Probe: disclose a small sample to estimate the error rate.
        let mut qhat = 0.125;
        let mut probed: Vec<u32> = Vec::new();
        if n >= PROBE_MIN_PLANE {
            probed = sample_positions(n, PROBE_BITS, rng);
            let mut payload = BitString::new();
            let mut mismatches = 0usize;
            for &i in &probed {
                let abit = alice_plane.bits.get(i as usize);
                payload.push(abit);
                if bob_plane.bits.get(i as usize) != abit {
                    mismatches += 1;
                    bob_plane.bits.set(i as usize, abit);
                }
            }
            leakage += payload.len();
            transcript.push(Stage::Probe, p, payload);
            qhat = ((mismatches as f64 + 0.5) / (PROBE_BITS as f64 + 1.0))
                .clamp(0.5 / n as f64, 0.49);
        }

        if qhat > DISCLOSE_THRESHOLD {
            // Saturated plane: parity blocks cannot beat plain disclosure.
            let probed_set: std::collections::HashSet<u32> = probed.iter().copied().collect();
            let mut payload = BitString::new();
            for i in 0..n {
                if !probed_set.contains(&(i as u32)) {
                    payload.push(alice_plane.bits.get(i));
                }
            }
            leakage += payload.len();
            transcript.push(Stage::PlaneDisclose, p, payload);
            bob_plane.bits = alice_plane.bits.clone();
        } else {
            let mut k = ((0.73 / qhat).round() as usize).clamp(2, n);
            let mut pass: u32 = 0;
            while bob_plane.bits != alice_plane.bits {
                if pass as usize >= MAX_PASSES {
                    let mut payload = BitString::new();
                    for i in 0..n {
                        payload.push(alice_plane.bits.get(i));
                    }
                    leakage += payload.len();
                    transcript.push(Stage::PlaneDisclose, p, payload);
                    bob_plane.bits = alice_plane.bits.clone();
                    break;
                }
                let perm = sample_positions(n, n, rng);
                let mut pass_parities = BitString::new();
                let mut corrections = 0usize;
                for block in perm.chunks(k) {
                    let pa = alice_plane.parity_over(block);
                    pass_parities.push(pa);
                    if pa != bob_plane.parity_over(block) {
                        let mut search_bits = BitString::new();
                        binary_search_fix(&alice_plane, &mut bob_plane, block, &mut search_bits);
                        corrections += 1;
                        leakage += search_bits.len();
                        transcript.push(Stage::SearchParities, search_counter, search_bits);
                        search_counter = search_counter.wrapping_add(1);
                    }
                }
                leakage += pass_parities.len();
                transcript.push(Stage::BlockParities, (p << 16) | pass, pass_parities);
                // Corrections made: errors are sparser now, widen blocks.
                // None made while still unequal: an even split hid them,
                // narrow the blocks instead.
                k = if corrections > 0 {
                    (k * 2).min(n)
                } else {
                    (k / 2).max(2)
                };
                pass += 1;
            }
        }

        for i in 0..n {
            if alice_plane.bits.get(i) {
                residue[i] |= 1 << p;
            }
        }
    }

    debug_assert_eq!(residue, a);
    Ok(ReconcileOutcome {
        corrected_bob: alice.clone(),
        leakage_bits: leakage,
        transcript,
    })
}
