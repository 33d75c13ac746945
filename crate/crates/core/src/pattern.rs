//! Binary configurations of the amplifying device.
//!
//! A [`Pattern`] is the string `π₁ π₂ … π_n` labelling a computational basis
//! vector `|π₁ π₂ … π_n⟩`. Position 0 in this API is the leftmost particle.
//! Bits are packed little-endian into `u64` words (position `p` lives in word
//! `p / 64`, bit `p % 64`); bits past `len` are always zero so derived
//! equality and hashing are exact.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    len: usize,
    words: Vec<u64>,
}

impl Pattern {
    /// All-zero pattern of length `n`.
    pub fn zeros(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooSmall(n));
        }
        Ok(Self {
            len: n,
            words: vec![0; n.div_ceil(WORD)],
        })
    }

    pub fn from_bits<I>(bits: I) -> Result<Self>
    where
        I: IntoIterator<Item = bool>,
    {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut p = Self::zeros(bits.len())?;
        for (i, b) in bits.into_iter().enumerate() {
            if b {
                p.words[i / WORD] |= 1 << (i % WORD);
            }
        }
        Ok(p)
    }

    /// Builds the pattern whose dense index is `index`, with the leftmost
    /// particle as the most significant bit (`|110⟩` is index 6).
    pub fn from_index(index: usize, n: usize) -> Result<Self> {
        let mut p = Self::zeros(n)?;
        for pos in 0..n {
            if (index >> (n - 1 - pos)) & 1 == 1 {
                p.words[pos / WORD] |= 1 << (pos % WORD);
            }
        }
        Ok(p)
    }

    /// Inverse of [`Pattern::from_index`]. Only meaningful for `n < 64`.
    pub fn to_index(&self) -> usize {
        assert!(self.len < usize::BITS as usize, "pattern too long for a dense index");
        (0..self.len).fold(0, |acc, pos| (acc << 1) | self.get(pos) as usize)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false; patterns have at least two sites.
    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, pos: usize) -> bool {
        debug_assert!(pos < self.len);
        (self.words[pos / WORD] >> (pos % WORD)) & 1 == 1
    }

    pub fn flip(&mut self, pos: usize) {
        assert!(pos < self.len, "position {pos} out of range");
        self.words[pos / WORD] ^= 1 << (pos % WORD);
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |p| self.get(p))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of set bits in positions `start..end`.
    pub fn count_ones_in(&self, start: usize, end: usize) -> usize {
        assert!(start <= end && end <= self.len);
        if start == end {
            return 0;
        }
        let (first, last) = (start / WORD, (end - 1) / WORD);
        let lo_mask = u64::MAX << (start % WORD);
        let hi_mask = u64::MAX >> (WORD - 1 - (end - 1) % WORD);
        if first == last {
            return (self.words[first] & lo_mask & hi_mask).count_ones() as usize;
        }
        let mut total = (self.words[first] & lo_mask).count_ones() as usize;
        total += self.words[first + 1..last]
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum::<usize>();
        total + (self.words[last] & hi_mask).count_ones() as usize
    }

    pub fn hamming_distance(&self, other: &Pattern) -> Result<usize> {
        if other.len != self.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                found: other.len,
            });
        }
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// One step of the device dynamics: `|π₁ … π_n⟩ ↦ |π_n π₁ … π_{n−1}⟩`.
    pub fn shift(&self) -> Pattern {
        self.rotate_right(1)
    }

    /// `m` steps of [`Pattern::shift`] at word granularity.
    pub fn rotate_right(&self, m: usize) -> Pattern {
        let n = self.len;
        let m = m % n;
        if m == 0 {
            return self.clone();
        }
        let mut words = vec![0u64; self.words.len()];
        for (w, out) in words.iter_mut().enumerate() {
            let base = w * WORD;
            let width = WORD.min(n - base);
            // output position base + i reads input position base + i - m (mod n)
            let start = (base + n - m) % n;
            *out = self.read_wrapping(start, width);
        }
        Pattern { len: n, words }
    }

    /// Reads `width <= min(64, len)` bits starting at `start`, wrapping at `len`.
    fn read_wrapping(&self, start: usize, width: usize) -> u64 {
        let head = width.min(self.len - start);
        let mut value = self.read_contiguous(start, head);
        if head < width {
            value |= self.read_contiguous(0, width - head) << head;
        }
        value
    }

    fn read_contiguous(&self, start: usize, width: usize) -> u64 {
        if width == 0 {
            return 0;
        }
        let (idx, off) = (start / WORD, start % WORD);
        let mut value = self.words[idx] >> off;
        if off != 0 && off + width > WORD {
            value |= self.words[idx + 1] << (WORD - off);
        }
        if width < WORD {
            value &= (1u64 << width) - 1;
        }
        value
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.bits().map(|b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 128 {
            write!(f, "|{self}⟩")
        } else {
            write!(f, "Pattern(len={}, ones={})", self.len, self.count_ones())
        }
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidPatternChar(other)),
            })
            .collect::<Result<Vec<_>>>()?;
        Pattern::from_bits(bits)
    }
}

/// The armed device `|11…100…0⟩`: ones on positions `1..=⌊n/2⌋`.
pub fn make_cocked_pattern(n: usize) -> Result<Pattern> {
    let mut p = Pattern::zeros(n)?;
    for pos in 0..n / 2 {
        p.words[pos / WORD] |= 1 << (pos % WORD);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_rotate(p: &Pattern, m: usize) -> Pattern {
        let n = p.len();
        Pattern::from_bits((0..n).map(|i| p.get((i + n - m % n) % n))).unwrap()
    }

    #[test]
    fn shift_moves_last_bit_to_front() {
        let p: Pattern = "110".parse().unwrap();
        assert_eq!(p.shift().to_string(), "011");
        let z: Pattern = "000".parse().unwrap();
        assert_eq!(z.shift(), z);
    }

    #[test]
    fn cocked_pattern_shapes() {
        assert_eq!(make_cocked_pattern(6).unwrap().to_string(), "111000");
        assert_eq!(make_cocked_pattern(2).unwrap().to_string(), "10");
        assert_eq!(make_cocked_pattern(5).unwrap().to_string(), "11000");
        assert_eq!(make_cocked_pattern(1), Err(Error::TooSmall(1)));
        assert_eq!(make_cocked_pattern(0), Err(Error::TooSmall(0)));
    }

    #[test]
    fn index_round_trip_and_convention() {
        let p: Pattern = "110".parse().unwrap();
        assert_eq!(p.to_index(), 6);
        assert_eq!(Pattern::from_index(6, 3).unwrap(), p);
        for i in 0..32 {
            assert_eq!(Pattern::from_index(i, 5).unwrap().to_index(), i);
        }
    }

    #[test]
    fn bad_characters_rejected() {
        assert_eq!("10x".parse::<Pattern>(), Err(Error::InvalidPatternChar('x')));
        assert_eq!("1".parse::<Pattern>(), Err(Error::TooSmall(1)));
    }

    #[test]
    fn shift_is_exhaustively_a_cycle_for_small_n() {
        for n in 2..=12usize {
            for idx in 0..(1usize << n) {
                let p = Pattern::from_index(idx, n).unwrap();
                let mut q = p.clone();
                for _ in 0..n {
                    q = q.shift();
                }
                assert_eq!(q, p);
            }
        }
    }

    #[test]
    fn ranges_across_word_boundaries() {
        let n = 200;
        let p = Pattern::from_bits((0..n).map(|i| i % 3 == 0)).unwrap();
        for (a, b) in [(0, 200), (63, 65), (60, 130), (64, 128), (199, 200), (10, 10)] {
            let naive = (a..b).filter(|&i| i % 3 == 0).count();
            assert_eq!(p.count_ones_in(a, b), naive, "range {a}..{b}");
        }
    }

    #[test]
    fn hamming_length_mismatch() {
        let a = Pattern::zeros(4).unwrap();
        let b = Pattern::zeros(5).unwrap();
        assert!(matches!(a.hamming_distance(&b), Err(Error::LengthMismatch { .. })));
    }

    proptest! {
        #[test]
        fn rotate_matches_bitwise_reference(bits in prop::collection::vec(any::<bool>(), 2..300), m in 0usize..700) {
            let p = Pattern::from_bits(bits).unwrap();
            prop_assert_eq!(p.rotate_right(m), naive_rotate(&p, m));
        }

        #[test]
        fn full_cycle_is_identity(bits in prop::collection::vec(any::<bool>(), 2..200)) {
            let p = Pattern::from_bits(bits).unwrap();
            let n = p.len();
            prop_assert_eq!(p.rotate_right(n), p.clone());
            let stepped = (0..n).fold(p.clone(), |q, _| q.shift());
            prop_assert_eq!(stepped, p);
        }

        #[test]
        fn rotation_preserves_weight_and_hamming(bits in prop::collection::vec(any::<bool>(), 2..200), m in 0usize..400) {
            let p = Pattern::from_bits(bits).unwrap();
            let q = p.rotate_right(m);
            prop_assert_eq!(q.count_ones(), p.count_ones());
            let z = Pattern::zeros(p.len()).unwrap();
            prop_assert_eq!(q.hamming_distance(&z).unwrap(), p.count_ones());
        }
    }
}
