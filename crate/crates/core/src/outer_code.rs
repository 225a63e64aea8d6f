//! Outer codes over GF(2^{a′}) with exhaustive list recovery.
//!
//! Any code here is GF(2)-linear: symbols are bit strings read most significant bit
//! first, and the integer they spell is the field element in the polynomial basis.
//! Consecutive symbols may be folded into blocks; list recovery then compares whole
//! blocks against per-block candidate sets.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitlinalg::BitVector;
use crate::error::{Error, Result};
use crate::gf::Gf2m;
use crate::rational::{self, Rational};

/// Largest message space (in bits) that list recovery will sweep.
pub const MAX_MESSAGE_BITS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterKind {
    /// Systematic generator `[I_k | C]` with `C` a Cauchy matrix, so the code is MDS.
    BruteForceLinear,
    /// Evaluations of the message polynomial at the first `n` field elements.
    ReedSolomon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoveryParams {
    #[serde(with = "rational::serde_str")]
    pub alpha: Rational,
    /// Largest admissible nonempty box (`l0`).
    pub box_limit: usize,
    /// Largest admissible output list (`L0`).
    pub list_bound: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OuterCodeSpec {
    pub kind: OuterKind,
    pub symbol_bits: u32,
    /// Codeword length in symbols.
    pub block_count: usize,
    pub message_symbols: usize,
    /// Symbols per recovery position; `block_count` must be a multiple of it.
    #[serde(default = "one")]
    pub fold: usize,
    pub recovery: RecoveryParams,
}

impl OuterCodeSpec {
    pub fn message_bits(&self) -> usize {
        self.message_symbols * self.symbol_bits as usize
    }

    pub fn positions(&self) -> usize {
        self.block_count / self.fold.max(1)
    }

    /// Bits per recovery position.
    pub fn position_bits(&self) -> usize {
        self.symbol_bits as usize * self.fold
    }

    pub fn rate(&self) -> Rational {
        Rational::new(self.message_symbols as u64, self.block_count as u64)
    }
}

/// A constructed outer code: field plus generator rows over GF(2^{a′}).
#[derive(Debug, Clone)]
pub struct OuterCode {
    spec: OuterCodeSpec,
    field: Gf2m,
    // generator[j][i]: contribution of message symbol j to codeword symbol i
    generator: Vec<Vec<u64>>,
}

impl OuterCode {
    pub fn new(spec: OuterCodeSpec) -> Result<Self> {
        let field = Gf2m::new(spec.symbol_bits)?;
        let (n, k) = (spec.block_count, spec.message_symbols);
        if k == 0 || k > n {
            return Err(Error::param(format!("outer code needs 1 <= k <= n, got k = {k}, n = {n}")));
        }
        if spec.fold == 0 || n % spec.fold != 0 {
            return Err(Error::param(format!("fold {} must divide block count {n}", spec.fold)));
        }
        if n as u64 > field.order() {
            return Err(Error::param(format!(
                "{n} symbols need distinct points but GF(2^{}) has {}",
                spec.symbol_bits,
                field.order()
            )));
        }
        let generator = match spec.kind {
            OuterKind::ReedSolomon => (0..k as u64)
                .map(|j| (0..n as u64).map(|point| field.pow(point, j)).collect())
                .collect(),
            OuterKind::BruteForceLinear => (0..k as u64)
                .map(|j| {
                    (0..n as u64)
                        .map(|i| match i.cmp(&(k as u64)) {
                            std::cmp::Ordering::Less => u64::from(i == j),
                            _ => field.inv(j ^ i).expect("distinct Cauchy points"),
                        })
                        .collect()
                })
                .collect(),
        };
        Ok(OuterCode { spec, field, generator })
    }

    pub fn spec(&self) -> &OuterCodeSpec {
        &self.spec
    }

    pub fn encode(&self, message: &[u64]) -> Result<Vec<u64>> {
        Error::check_dim(self.spec.message_symbols, message.len())?;
        if let Some(&bad) = message.iter().find(|&&s| !self.field.contains(s)) {
            return Err(Error::param(format!("symbol {bad} outside GF(2^{})", self.spec.symbol_bits)));
        }
        let mut out = vec![0u64; self.spec.block_count];
        for (row, &m) in self.generator.iter().zip(message) {
            if m == 0 {
                continue;
            }
            for (o, &g) in out.iter_mut().zip(row) {
                *o ^= self.field.mul(m, g);
            }
        }
        Ok(out)
    }

    /// Message symbols from the integer whose MSB-first bits are the message bits.
    pub fn message_from_index(&self, index: u64) -> Vec<u64> {
        let a = self.spec.symbol_bits;
        let k = self.spec.message_symbols;
        let mask = (1u64 << a) - 1;
        (0..k).map(|j| (index >> (a as usize * (k - 1 - j))) & mask).collect()
    }

    pub fn message_index(&self, message: &[u64]) -> u64 {
        let a = self.spec.symbol_bits;
        message.iter().fold(0, |acc, &s| (acc << a) | s)
    }

    /// Codeword symbols grouped into recovery positions, each as one integer.
    pub fn fold_codeword(&self, codeword: &[u64]) -> Vec<u64> {
        let a = self.spec.symbol_bits;
        codeword
            .chunks(self.spec.fold)
            .map(|chunk| chunk.iter().fold(0, |acc, &s| (acc << a) | s))
            .collect()
    }

    /// Every message whose folded codeword misses its box in at most `⌊α·N⌋` of the
    /// `N` positions, ascending by message value.
    pub fn list_recover(&self, input: &RecoveryInput) -> Result<Vec<Vec<u64>>> {
        let positions = self.spec.positions();
        Error::check_dim(positions, input.boxes.len())?;
        let bits = self.spec.message_bits();
        if bits > MAX_MESSAGE_BITS {
            return Err(Error::CapExceeded {
                what: "outer codeword sweep",
                required: 1u128 << bits.min(127),
                cap: 1u128 << MAX_MESSAGE_BITS,
            });
        }
        let limit = self.spec.recovery.box_limit;
        if let Some((j, b)) = input.boxes.iter().enumerate().find(|(_, b)| b.len() > limit) {
            return Err(Error::param(format!("box {j} holds {} candidates, limit is {limit}", b.len())));
        }
        let allowed = rational::floor_mul(&input.alpha, positions as u64) as usize;
        let boxes: Vec<Vec<u64>> = input.boxes.iter().map(|b| b.iter().copied().collect()).collect();

        // Basis codewords for each message bit, so a Gray-code walk costs one XOR pass per step.
        let basis: Vec<Vec<u64>> = (0..bits)
            .map(|t| self.encode(&self.message_from_index(1u64 << t)))
            .collect::<Result<_>>()?;
        let chunk_bits = bits.min(12);
        let chunks = 1u64 << (bits - chunk_bits);
        let mut found: Vec<u64> = (0..chunks)
            .into_par_iter()
            .flat_map_iter(|hi| {
                let base = hi << chunk_bits;
                let mut word = self.encode(&self.message_from_index(base)).expect("valid message");
                let mut hits = Vec::new();
                let mut gray = 0u64;
                for step in 0..1u64 << chunk_bits {
                    if step > 0 {
                        let flip = step.trailing_zeros() as usize;
                        gray ^= 1 << flip;
                        for (w, b) in word.iter_mut().zip(&basis[flip]) {
                            *w ^= b;
                        }
                    }
                    let misses = self
                        .fold_codeword(&word)
                        .iter()
                        .zip(&boxes)
                        .filter(|(v, b)| b.binary_search(v).is_err())
                        .count();
                    if misses <= allowed {
                        hits.push(base | gray);
                    }
                }
                hits
            })
            .collect();
        found.sort_unstable();
        if found.len() > self.spec.recovery.list_bound {
            return Err(Error::ListOverflow { found: found.len(), bound: self.spec.recovery.list_bound });
        }
        Ok(found.into_iter().map(|u| self.message_from_index(u)).collect())
    }
}

/// Candidate sets per recovery position; an empty set disagrees with everything.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveryInput {
    pub boxes: Vec<BTreeSet<u64>>,
    pub alpha: Rational,
}

pub fn outer_encode(spec: &OuterCodeSpec, message: &[u64]) -> Result<Vec<u64>> {
    OuterCode::new(*spec)?.encode(message)
}

pub fn list_recover(spec: &OuterCodeSpec, input: &RecoveryInput) -> Result<Vec<Vec<u64>>> {
    OuterCode::new(*spec)?.list_recover(input)
}

/// Splits `bits` into `width`-bit symbols (MSB first within each symbol).
///
/// With `pad` set, a short final symbol is completed with zero bits; without it,
/// a length that is not a multiple of `width` is an error.
pub fn fold_symbols(bits: &BitVector, width: u32, pad: bool) -> Result<Vec<u64>> {
    let w = width as usize;
    if w == 0 || w > 64 {
        return Err(Error::param(format!("symbol width {width} outside 1..=64")));
    }
    if !bits.len().is_multiple_of(w) && !pad {
        return Err(Error::param(format!(
            "{} bits do not split into {width}-bit symbols without padding",
            bits.len()
        )));
    }
    let mut padded = bits.clone();
    while !padded.len().is_multiple_of(w) {
        padded.push(false);
    }
    (0..padded.len() / w)
        .map(|s| Ok(padded.slice(s * w, (s + 1) * w)?.to_msb_first().expect("w <= 64")))
        .collect()
}

/// Inverse of [`fold_symbols`]: rebuilds `bit_len` bits, rejecting nonzero padding.
pub fn unfold_symbols(symbols: &[u64], width: u32, bit_len: usize) -> Result<BitVector> {
    let w = width as usize;
    if w == 0 || w > 64 {
        return Err(Error::param(format!("symbol width {width} outside 1..=64")));
    }
    Error::check_dim(bit_len.div_ceil(w), symbols.len())?;
    let mut bits = BitVector::new();
    for &s in symbols {
        if w < 64 && s >> w != 0 {
            return Err(Error::param(format!("symbol {s} wider than {width} bits")));
        }
        bits.extend_from(&BitVector::from_msb_first(s, w));
    }
    if (bit_len..bits.len()).any(|i| bits.bit(i)) {
        return Err(Error::param("nonzero padding bits"));
    }
    bits.slice(0, bit_len)
}
