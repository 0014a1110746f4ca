//! Word-packed bit string used for key material, reconciliation planes and
//! hashed output.
//!
//! Bit `i` lives in `words[i / 64]` at position `i % 64` (LSB-first). Bits
//! past `len` in the last word are kept zero, so equality and parity can
//! work on whole words.

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    /// All-zero string of `len` bits.
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        let w = &mut self.words[i / 64];
        let mask = 1u64 << (i % 64);
        if v {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn push(&mut self, v: bool) {
        if self.len % 64 == 0 {
            self.words.push(0);
        }
        let i = self.len;
        self.len += 1;
        if v {
            self.words[i / 64] |= 1u64 << (i % 64);
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    /// Pack to bytes, bit `8k + j` at bit position `j` of byte `k`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len.div_ceil(8)];
        for (k, byte) in out.iter_mut().enumerate() {
            *byte = ((self.words[k / 8] >> ((k % 8) * 8)) & 0xFF) as u8;
        }
        out
    }

    /// Inverse of `to_bytes` for a known bit length.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Option<Self> {
        if bytes.len() != len.div_ceil(8) {
            return None;
        }
        let mut s = BitString::zeros(len);
        for (k, &byte) in bytes.iter().enumerate() {
            s.words[k / 8] |= (byte as u64) << ((k % 8) * 8);
        }
        // reject stray bits beyond len
        if len % 8 != 0 {
            let last = bytes[len / 8];
            if last >> (len % 8) != 0 {
                return None;
            }
        }
        Some(s)
    }

    /// Lowercase hex of `to_bytes`.
    pub fn to_hex(&self) -> String {
        self.to_bytes().iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<T: IntoIterator<Item = bool>>(iter: T) -> Self {
        let mut s = BitString::new();
        for b in iter {
            s.push(b);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_get_set_roundtrip() {
        let mut s = BitString::new();
        let pattern: Vec<bool> = (0..200).map(|i| i % 3 == 0).collect();
        for &b in &pattern {
            s.push(b);
        }
        assert_eq!(s.len(), 200);
        for (i, &b) in pattern.iter().enumerate() {
            assert_eq!(s.get(i), b);
        }
        s.set(7, true);
        assert!(s.get(7));
        s.flip(7);
        assert!(!s.get(7));
    }

    #[test]
    fn byte_round_trip_and_hex() {
        let s: BitString = (0..13).map(|i| i % 2 == 0).collect();
        let bytes = s.to_bytes();
        assert_eq!(bytes.len(), 2);
        assert_eq!(BitString::from_bytes(&bytes, 13).unwrap(), s);
        // 0b01010101 = 0x55, high bits of second byte zero
        assert_eq!(s.to_hex(), "5515");
        // stray bits rejected
        assert!(BitString::from_bytes(&[0xFF, 0xFF], 13).is_none());
        assert!(BitString::from_bytes(&[0x00], 13).is_none());
    }

    #[test]
    fn trailing_word_bits_stay_zero() {
        let mut s = BitString::zeros(70);
        s.set(69, true);
        s.set(69, false);
        assert_eq!(s, BitString::zeros(70));
        assert_eq!(s.count_ones(), 0);
    }
}
