//! Fixed-length binary genotypes.
//!
//! A genotype is an ordered sequence of bits of length `n`, 1 ≤ n ≤ 64,
//! packed into a `u64`.  Bit `i` of the sequence is bit `i` of the word, and
//! bitstrings are written with bit 0 leftmost, so `"1100"` has bits 0 and 1
//! set.

use alloc::format;
use core::fmt;

use rand::Rng;

use crate::error::{Error, Result};

/// A fixed-length bit vector, the unit of search.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Genotype {
    bits: u64,
    len: u8,
}

impl Genotype {
    /// Maximum supported genotype length for this build.
    pub const MAX_LEN: usize = 64;

    pub(crate) fn word_mask(n: usize) -> u64 {
        if n == 64 {
            u64::MAX
        } else {
            (1u64 << n) - 1
        }
    }

    fn assert_len(n: usize) {
        assert!(
            (1..=Self::MAX_LEN).contains(&n),
            "genotype length must be in 1..={}, got {n}",
            Self::MAX_LEN
        );
    }

    /// All-zeros genotype of length `n`.
    ///
    /// Panics if `n` is 0 or exceeds [`Self::MAX_LEN`].
    pub fn zeros(n: usize) -> Self {
        Self::assert_len(n);
        Genotype { bits: 0, len: n as u8 }
    }

    /// All-ones genotype of length `n`.
    pub fn ones(n: usize) -> Self {
        Self::assert_len(n);
        Genotype {
            bits: Self::word_mask(n),
            len: n as u8,
        }
    }

    /// Genotype from the low `n` bits of `bits`; higher bits are discarded.
    pub fn from_bits(bits: u64, n: usize) -> Self {
        Self::assert_len(n);
        Genotype {
            bits: bits & Self::word_mask(n),
            len: n as u8,
        }
    }

    /// Uniformly random genotype of length `n`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self::from_bits(rng.gen::<u64>(), n)
    }

    /// Parses a string of `0`/`1` characters, leftmost character = bit 0.
    pub fn from_bitstring(s: &str) -> Result<Self> {
        let n = s.len();
        if !(1..=Self::MAX_LEN).contains(&n) {
            return Err(Error::Config(format!(
                "bitstring length must be in 1..={}, got {n}",
                Self::MAX_LEN
            )));
        }
        let mut bits = 0u64;
        for (i, c) in s.chars().enumerate() {
            match c {
                '1' => bits |= 1u64 << i,
                '0' => {}
                other => {
                    return Err(Error::Config(format!(
                        "invalid character {other:?} in bitstring {s:?}"
                    )))
                }
            }
        }
        Ok(Genotype { bits, len: n as u8 })
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        false // length is always ≥ 1
    }

    /// Raw bit pattern (low `len` bits).
    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn bit(&self, i: usize) -> bool {
        debug_assert!(i < self.len());
        self.bits >> i & 1 == 1
    }

    pub fn flip_bit(&mut self, i: usize) {
        debug_assert!(i < self.len());
        self.bits ^= 1u64 << i;
    }

    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Number of positions where `self` and `other` differ.
    pub fn hamming(&self, other: &Self) -> u32 {
        debug_assert_eq!(self.len, other.len, "genotype lengths differ");
        (self.bits ^ other.bits).count_ones()
    }

    /// Genotype with every bit flipped.
    pub fn complement(&self) -> Self {
        Genotype {
            bits: !self.bits & Self::word_mask(self.len()),
            len: self.len,
        }
    }
}

impl fmt::Display for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Genotype({self})")
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for Genotype {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for Genotype {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        let s = <alloc::string::String as serde::Deserialize>::deserialize(deserializer)?;
        Genotype::from_bitstring(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;

    #[test]
    fn bitstring_round_trip() {
        for s in ["0", "1", "1010", "11110000", "1111111111111111"] {
            let g = Genotype::from_bitstring(s).unwrap();
            assert_eq!(alloc::format!("{g}"), s);
        }
    }

    #[test]
    fn rejects_bad_bitstrings() {
        assert!(Genotype::from_bitstring("").is_err());
        assert!(Genotype::from_bitstring("012").is_err());
        assert!(Genotype::from_bitstring(&"1".repeat(65)).is_err());
    }

    #[test]
    fn bit_order_is_leftmost_first() {
        let g = Genotype::from_bitstring("1100").unwrap();
        assert!(g.bit(0) && g.bit(1) && !g.bit(2) && !g.bit(3));
        assert_eq!(g.bits(), 0b0011);
    }

    #[test]
    fn hamming_and_complement() {
        let a = Genotype::from_bitstring("1010").unwrap();
        let b = Genotype::from_bitstring("0101").unwrap();
        assert_eq!(a.hamming(&b), 4);
        assert_eq!(a.complement(), b);
        assert_eq!(a.hamming(&a), 0);
    }

    #[test]
    fn full_width_mask() {
        let g = Genotype::ones(64);
        assert_eq!(g.count_ones(), 64);
        assert_eq!(g.complement().count_ones(), 0);
    }

    #[test]
    fn random_is_masked() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let g = Genotype::random(5, &mut rng);
            assert_eq!(g.bits() & !Genotype::word_mask(5), 0);
        }
    }

    proptest! {
        #[test]
        fn display_parse_round_trip(bits: u64, n in 1usize..=64) {
            let g = Genotype::from_bits(bits, n);
            let s = alloc::format!("{g}");
            prop_assert_eq!(Genotype::from_bitstring(&s).unwrap(), g);
        }

        #[test]
        fn complement_is_involutive(bits: u64, n in 1usize..=64) {
            let g = Genotype::from_bits(bits, n);
            prop_assert_eq!(g.complement().complement(), g);
            prop_assert_eq!(g.hamming(&g.complement()) as usize, n);
        }
    }
}
