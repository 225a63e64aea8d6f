use std::cmp::Ordering;
use std::fmt;
use std::ops::{BitXor, BitXorAssign};
use std::str::FromStr;

use smallvec::SmallVec;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

type Words = SmallVec<[u64; 2]>;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

#[inline]
fn low_mask(bits: usize) -> u64 {
    if bits >= WORD_BITS {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// A packed binary string / GF(2) row vector.
///
/// Bit `i` lives in word `i / 64` at position `i % 64` (least significant bit first).
/// Bits past `len` are always zero, so derived equality and hashing are structural.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    words: Words,
    len: usize,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        let mut words = Words::new();
        words.resize(words_for(len), 0);
        BitVector { words, len }
    }

    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &bit) in bits.iter().enumerate() {
            if bit {
                v.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        v
    }

    /// Low `len` bits of `value`, bit `i` of the vector being bit `i` of the integer.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= WORD_BITS, "from_u64 supports at most 64 bits");
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = value & low_mask(len);
        }
        v
    }

    /// Inverse of [`BitVector::from_u64`]; `None` when longer than 64 bits.
    pub fn to_u64(&self) -> Option<u64> {
        match self.len {
            0 => Some(0),
            l if l <= WORD_BITS => Some(self.words[0]),
            _ => None,
        }
    }

    /// Interprets `width` bits of `value` with the most significant bit first, so that
    /// `from_msb_first(0b10, 2)` is the string "10".
    pub fn from_msb_first(value: u64, width: usize) -> Self {
        assert!(width <= WORD_BITS);
        let mut v = Self::zeros(width);
        for i in 0..width {
            if (value >> (width - 1 - i)) & 1 == 1 {
                v.words[0] |= 1 << i;
            }
        }
        v
    }

    /// Inverse of [`BitVector::from_msb_first`].
    pub fn to_msb_first(&self) -> Option<u64> {
        if self.len > WORD_BITS {
            return None;
        }
        Some(self.iter().fold(0u64, |acc, bit| (acc << 1) | bit as u64))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, index: usize) -> Option<bool> {
        (index < self.len).then(|| self.bit(index))
    }

    /// Panics when `index >= len`.
    #[inline]
    pub fn bit(&self, index: usize) -> bool {
        assert!(index < self.len, "bit index {index} out of range for length {}", self.len);
        (self.words[index / WORD_BITS] >> (index % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, index: usize, value: bool) -> Result<()> {
        if index >= self.len {
            return Err(Error::OutOfRange { index, len: self.len });
        }
        let mask = 1u64 << (index % WORD_BITS);
        if value {
            self.words[index / WORD_BITS] |= mask;
        } else {
            self.words[index / WORD_BITS] &= !mask;
        }
        Ok(())
    }

    pub fn push(&mut self, value: bool) {
        if self.len.is_multiple_of(WORD_BITS) {
            self.words.push(0);
        }
        if value {
            self.words[self.len / WORD_BITS] |= 1 << (self.len % WORD_BITS);
        }
        self.len += 1;
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.bit(i))
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// GF(2) inner product.
    pub fn dot(&self, other: &BitVector) -> Result<bool> {
        Error::check_dim(self.len, other.len)?;
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        Ok(ones & 1 == 1)
    }

    pub fn xor(&self, other: &BitVector) -> Result<BitVector> {
        Error::check_dim(self.len, other.len)?;
        let mut out = self.clone();
        out.xor_in_place(other);
        Ok(out)
    }

    /// Lengths must match; panics otherwise.
    pub fn xor_in_place(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Copy of bits `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> Result<BitVector> {
        if start > end || end > self.len {
            return Err(Error::OutOfRange { index: end.max(start), len: self.len });
        }
        let len = end - start;
        let mut out = Self::zeros(len);
        let shift = start % WORD_BITS;
        let first = start / WORD_BITS;
        for k in 0..out.words.len() {
            let lo = self.words.get(first + k).copied().unwrap_or(0) >> shift;
            let hi = if shift == 0 {
                0
            } else {
                self.words.get(first + k + 1).copied().unwrap_or(0) << (WORD_BITS - shift)
            };
            out.words[k] = lo | hi;
        }
        out.clear_tail();
        Ok(out)
    }

    pub fn extend_from(&mut self, other: &BitVector) {
        // TODO: word-level append when self.len is word aligned
        for bit in other.iter() {
            self.push(bit);
        }
    }

    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a BitVector>) -> BitVector {
        let mut out = BitVector::new();
        for part in parts {
            out.extend_from(part);
        }
        out
    }

    /// Returns a copy with `value` inserted before position `pos` (`pos == len` appends).
    pub fn with_inserted(&self, pos: usize, value: bool) -> Result<BitVector> {
        if pos > self.len {
            return Err(Error::OutOfRange { index: pos, len: self.len });
        }
        let new_len = self.len + 1;
        let mut words = Words::new();
        words.resize(words_for(new_len), 0);
        let w = pos / WORD_BITS;
        let o = pos % WORD_BITS;
        for k in 0..words.len() {
            let cur = self.words.get(k).copied().unwrap_or(0);
            words[k] = match k.cmp(&w) {
                Ordering::Less => cur,
                Ordering::Equal => {
                    let low = cur & low_mask(o);
                    let high = cur & !low_mask(o);
                    low | ((value as u64) << o) | (high << 1)
                }
                Ordering::Greater => {
                    let prev = self.words.get(k - 1).copied().unwrap_or(0);
                    (cur << 1) | (prev >> (WORD_BITS - 1))
                }
            };
        }
        let mut out = BitVector { words, len: new_len };
        out.clear_tail();
        Ok(out)
    }

    /// Returns a copy with the bit at `pos` removed.
    pub fn with_removed(&self, pos: usize) -> Result<BitVector> {
        if pos >= self.len {
            return Err(Error::OutOfRange { index: pos, len: self.len });
        }
        let new_len = self.len - 1;
        let mut words = Words::new();
        words.resize(words_for(new_len), 0);
        let w = pos / WORD_BITS;
        let o = pos % WORD_BITS;
        for k in 0..words.len() {
            let cur = self.words[k];
            let carry = self.words.get(k + 1).map_or(0, |next| (next & 1) << (WORD_BITS - 1));
            words[k] = match k.cmp(&w) {
                Ordering::Less => cur,
                Ordering::Equal => (cur & low_mask(o)) | ((cur >> 1) & !low_mask(o)) | carry,
                Ordering::Greater => (cur >> 1) | carry,
            };
        }
        let mut out = BitVector { words, len: new_len };
        out.clear_tail();
        Ok(out)
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= low_mask(rem);
            }
        }
        self.words.truncate(words_for(self.len));
    }
}

impl Ord for BitVector {
    /// Shorter strings first, then lexicographic from bit 0.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then_with(|| {
            for (a, b) in self.words.iter().zip(&other.words) {
                if a != b {
                    let diff = a ^ b;
                    let first = diff.trailing_zeros();
                    return ((a >> first) & 1).cmp(&((b >> first) & 1));
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for BitVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl BitXor for &BitVector {
    type Output = BitVector;

    fn bitxor(self, rhs: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_in_place(rhs);
        out
    }
}

impl BitXorAssign<&BitVector> for BitVector {
    fn bitxor_assign(&mut self, rhs: &BitVector) {
        self.xor_in_place(rhs);
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in self.iter() {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector(\"{self}\")")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    /// Parses an ASCII bitstring. Surrounding whitespace is ignored; anything other
    /// than `0`/`1` inside is rejected.
    fn from_str(s: &str) -> Result<Self> {
        let mut v = BitVector::new();
        for (i, c) in s.trim().chars().enumerate() {
            match c {
                '0' => v.push(false),
                '1' => v.push(true),
                other => return Err(Error::parse(format!("invalid bit {other:?} at offset {i}"))),
            }
        }
        Ok(v)
    }
}

impl serde::Serialize for BitVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for BitVector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(bv("0110").to_string(), "0110");
        assert_eq!(bv("").len(), 0);
        assert!("01x".parse::<BitVector>().is_err());
        assert_eq!(bv(" 101\n"), bv("101"));
    }

    #[test]
    fn out_of_range_is_an_error() {
        let mut v = bv("101");
        assert_eq!(v.get(3), None);
        assert!(v.set(3, true).is_err());
        assert!(v.slice(2, 4).is_err());
        assert!(v.with_removed(3).is_err());
        assert!(v.with_inserted(4, true).is_err());
    }

    #[test]
    fn msb_first_round_trip() {
        assert_eq!(BitVector::from_msb_first(0b10, 2), bv("10"));
        assert_eq!(bv("1011").to_msb_first(), Some(11));
    }

    #[test]
    fn ordering_is_length_then_lexicographic() {
        let mut xs = [bv("10"), bv("0"), bv("01"), bv(""), bv("00")];
        xs.sort();
        let strs: Vec<String> = xs.iter().map(ToString::to_string).collect();
        assert_eq!(strs, ["", "0", "00", "01", "10"]);
    }

    fn as_string_insert(s: &str, pos: usize, bit: bool) -> String {
        let mut out = s.to_string();
        out.insert(pos, if bit { '1' } else { '0' });
        out
    }

    proptest! {
        #[test]
        fn insert_remove_match_string_model(bits in proptest::collection::vec(any::<bool>(), 0..200), pos_seed in any::<usize>(), bit in any::<bool>()) {
            let v = BitVector::from_bools(&bits);
            let s = v.to_string();
            let ins_pos = pos_seed % (bits.len() + 1);
            let inserted = v.with_inserted(ins_pos, bit).unwrap();
            prop_assert_eq!(inserted.to_string(), as_string_insert(&s, ins_pos, bit));
            prop_assert_eq!(inserted.with_removed(ins_pos).unwrap(), v.clone());
            if !bits.is_empty() {
                let del = pos_seed % bits.len();
                let mut expected = s.clone();
                expected.remove(del);
                prop_assert_eq!(v.with_removed(del).unwrap().to_string(), expected);
            }
        }

        #[test]
        fn slice_matches_string_model(bits in proptest::collection::vec(any::<bool>(), 0..200), a in any::<usize>(), b in any::<usize>()) {
            let v = BitVector::from_bools(&bits);
            let (mut lo, mut hi) = (a % (bits.len() + 1), b % (bits.len() + 1));
            if lo > hi { std::mem::swap(&mut lo, &mut hi); }
            let s = v.to_string();
            prop_assert_eq!(v.slice(lo, hi).unwrap().to_string(), &s[lo..hi]);
        }
    }
}
