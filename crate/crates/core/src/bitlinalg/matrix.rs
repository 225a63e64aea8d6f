use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::BitVector;
use crate::error::{Error, Result};

/// Dense `a × b` matrix over GF(2), stored as `a` packed rows of length `b`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: Vec<BitVector>,
    cols: usize,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix { rows: vec![BitVector::zeros(cols); rows], cols }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i].set(i, true).expect("diagonal in range");
        }
        m
    }

    /// Every row must have length `cols`.
    pub fn from_rows(rows: Vec<BitVector>, cols: usize) -> Result<Self> {
        for row in &rows {
            Error::check_dim(cols, row.len())?;
        }
        Ok(BitMatrix { rows, cols })
    }

    /// Builds a matrix from equal-length ASCII bitstrings.
    pub fn parse_rows(rows: &[&str]) -> Result<Self> {
        let parsed: Vec<BitVector> = rows.iter().map(|r| r.parse()).collect::<Result<_>>()?;
        let cols = parsed.first().map_or(0, BitVector::len);
        Self::from_rows(parsed, cols)
    }

    /// Reshapes a vector of length `rows * cols` in row-major order.
    pub fn from_row_major(bits: &BitVector, rows: usize, cols: usize) -> Result<Self> {
        Error::check_dim(rows * cols, bits.len())?;
        let rows = (0..rows)
            .map(|r| bits.slice(r * cols, (r + 1) * cols))
            .collect::<Result<_>>()?;
        Ok(BitMatrix { rows, cols })
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn get(&self, r: usize, c: usize) -> Option<bool> {
        self.rows.get(r).and_then(|row| row.get(c))
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) -> Result<()> {
        let len = self.rows.len();
        self.rows
            .get_mut(r)
            .ok_or(Error::OutOfRange { index: r, len })?
            .set(c, value)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVector::is_zero)
    }

    /// Row vector times matrix: `x · M`.
    pub fn mul_left(&self, x: &BitVector) -> Result<BitVector> {
        mat_vec_mul(x, self)
    }

    pub fn rank(&self) -> usize {
        Echelon::new(self).rank()
    }

    pub fn is_full_row_rank(&self) -> bool {
        self.rank() == self.rows.len()
    }

    /// A nonzero `x` with `x · M = 0`, if the rows are dependent.
    pub fn left_kernel_vector(&self) -> Option<BitVector> {
        Echelon::new(self).left_kernel_vector()
    }

    /// Membership of `v` in the row space.
    pub fn row_space_contains(&self, v: &BitVector) -> Result<bool> {
        Error::check_dim(self.cols, v.len())?;
        Ok(Echelon::new(self).reduce(v).0.is_zero())
    }

    pub fn row_major_bits(&self) -> BitVector {
        BitVector::concat(&self.rows)
    }
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.rows.iter().map(ToString::to_string)).finish()
    }
}

/// `result_j = XOR_i x_i · M_{i,j}`.
pub fn mat_vec_mul(x: &BitVector, m: &BitMatrix) -> Result<BitVector> {
    Error::check_dim(m.row_count(), x.len())?;
    let mut acc = BitVector::zeros(m.col_count());
    for (i, row) in m.rows.iter().enumerate() {
        if x.bit(i) {
            acc ^= row;
        }
    }
    Ok(acc)
}

pub fn rank(m: &BitMatrix) -> usize {
    m.rank()
}

/// Row-reduced copy of a matrix that remembers, for every reduced row, which
/// original rows were combined to produce it.
///
/// Pivots are chosen leftmost column first, and within a column the lowest
/// remaining row index, so the reduction is fully deterministic.
#[derive(Debug, Clone)]
pub(crate) struct Echelon {
    // (pivot column, reduced row, combination of original rows)
    pivots: Vec<(usize, BitVector, BitVector)>,
    zero_combos: Vec<BitVector>,
    rows: usize,
}

impl Echelon {
    pub(crate) fn new(m: &BitMatrix) -> Self {
        let a = m.row_count();
        let mut work: Vec<(BitVector, BitVector)> = m
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut combo = BitVector::zeros(a);
                combo.set(i, true).expect("row index in range");
                (r.clone(), combo)
            })
            .collect();
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..m.col_count() {
            let Some(found) = (next..a).find(|&r| work[r].0.bit(col)) else {
                continue;
            };
            work.swap(next, found);
            let (prow, pcombo) = work[next].clone();
            for (r, (row, combo)) in work.iter_mut().enumerate() {
                if r != next && row.bit(col) {
                    *row ^= &prow;
                    *combo ^= &pcombo;
                }
            }
            pivots.push((col, prow, pcombo));
            next += 1;
            if next == a {
                break;
            }
        }
        let zero_combos = work.drain(next..).map(|(_, c)| c).collect();
        Echelon { pivots, zero_combos, rows: a }
    }

    pub(crate) fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub(crate) fn left_kernel_vector(&self) -> Option<BitVector> {
        self.zero_combos.first().cloned()
    }

    /// Reduces `v` against the pivots; returns the residue and the combination of
    /// original rows that was subtracted.
    pub(crate) fn reduce(&self, v: &BitVector) -> (BitVector, BitVector) {
        let mut residue = v.clone();
        let mut combo = BitVector::zeros(self.rows);
        for (col, row, c) in &self.pivots {
            if residue.bit(*col) {
                residue ^= row;
                combo ^= c;
            }
        }
        (residue, combo)
    }

    pub(crate) fn basis(&self) -> Vec<BitVector> {
        self.pivots.iter().map(|(_, r, _)| r.clone()).collect()
    }
}

/// The unique `x` with `x · M = c`, or `None` when `c` is outside the row space.
pub fn solve_left(m: &BitMatrix, c: &BitVector) -> Result<Option<BitVector>> {
    Error::check_dim(m.col_count(), c.len())?;
    let ech = Echelon::new(m);
    if ech.rank() != m.row_count() {
        return Err(Error::RankDeficient { rank: ech.rank(), rows: m.row_count() });
    }
    let (residue, combo) = ech.reduce(c);
    Ok(residue.is_zero().then_some(combo))
}

/// Reduced basis of the intersection of the row spaces of `mats`.
///
/// An empty basis means the intersection is `{0}`. Pairwise intersection uses the
/// Zassenhaus construction: reduce `[[U, U], [W, 0]]`; rows whose left half vanishes
/// span `row U ∩ row W` in their right half.
pub fn row_space_intersection(mats: &[BitMatrix]) -> Result<Vec<BitVector>> {
    let (first, rest) = mats
        .split_first()
        .ok_or_else(|| Error::param("row space intersection of an empty list"))?;
    let b = first.col_count();
    let mut basis = Echelon::new(first).basis();
    for m in rest {
        Error::check_dim(b, m.col_count())?;
        if basis.is_empty() {
            break;
        }
        basis = intersect_pair(&basis, m.rows(), b);
    }
    Ok(basis)
}

fn intersect_pair(u: &[BitVector], w: &[BitVector], b: usize) -> Vec<BitVector> {
    let mut stacked = Vec::with_capacity(u.len() + w.len());
    for row in u {
        stacked.push(BitVector::concat([row, row]));
    }
    let zero = BitVector::zeros(b);
    for row in w {
        stacked.push(BitVector::concat([row, &zero]));
    }
    let big = BitMatrix { rows: stacked, cols: 2 * b };
    let ech = Echelon::new(&big);
    let tail: Vec<BitVector> = ech
        .pivots
        .iter()
        .filter(|(col, _, _)| *col >= b)
        .map(|(_, row, _)| row.slice(b, 2 * b).expect("right half in range"))
        .collect();
    // Canonical form for deterministic output.
    let tail_m = BitMatrix { rows: tail, cols: b };
    Echelon::new(&tail_m).basis()
}

/// Deterministic uniform `a × b` matrix for a 64-bit seed.
///
/// The seed keys a ChaCha8 stream; row `r` consumes `⌈b/64⌉` consecutive words of
/// that stream, with bit `c` of row `r` taken from bit `c % 64` of word
/// `r·⌈b/64⌉ + c/64`. Distinct seeds give independent streams, so matrices for a
/// sequence can be generated in any order or in parallel.
pub fn random_matrix(a: usize, b: usize, seed: u64) -> BitMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..a)
        .map(|_| {
            let bits: Vec<bool> = (0..b.div_ceil(64))
                .flat_map(|_| {
                    let word = rng.next_u64();
                    (0..64).map(move |i| (word >> i) & 1 == 1)
                })
                .take(b)
                .collect();
            BitVector::from_bools(&bits)
        })
        .collect();
    BitMatrix { rows, cols: b }
}

/// JSON form: `{"a": rows, "b": cols, "rows": [hex, ...]}`.
///
/// Each row is read as a `b`-bit big-endian number whose most significant bit is
/// column 0, written as exactly `⌈b/4⌉` lowercase hex digits (upper case accepted on
/// input). Leading pad bits must be zero.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    a: usize,
    b: usize,
    rows: Vec<String>,
}

pub fn row_to_hex(row: &BitVector) -> String {
    let digits = row.len().div_ceil(4);
    let pad = digits * 4 - row.len();
    let mut padded = BitVector::zeros(pad);
    padded.extend_from(row);
    (0..digits)
        .map(|d| {
            let nibble = (0..4).fold(0u32, |acc, k| (acc << 1) | padded.bit(d * 4 + k) as u32);
            char::from_digit(nibble, 16).expect("nibble < 16")
        })
        .collect()
}

pub fn row_from_hex(s: &str, b: usize) -> Result<BitVector> {
    let digits = b.div_ceil(4);
    if s.len() != digits {
        return Err(Error::parse(format!("row {s:?} must have {digits} hex digits for b = {b}")));
    }
    let mut bits = BitVector::new();
    for c in s.chars() {
        let nibble = c
            .to_digit(16)
            .ok_or_else(|| Error::parse(format!("invalid hex digit {c:?}")))?;
        for k in (0..4).rev() {
            bits.push((nibble >> k) & 1 == 1);
        }
    }
    let pad = digits * 4 - b;
    if (0..pad).any(|i| bits.bit(i)) {
        return Err(Error::parse(format!("row {s:?} sets bits beyond column count {b}")));
    }
    bits.slice(pad, digits * 4)
}

impl Serialize for BitMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            a: self.row_count(),
            b: self.cols,
            rows: self.rows.iter().map(row_to_hex).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BitMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = MatrixJson::deserialize(deserializer)?;
        if raw.rows.len() != raw.a {
            return Err(D::Error::custom(format!(
                "matrix declares a = {} but lists {} rows",
                raw.a,
                raw.rows.len()
            )));
        }
        let rows = raw
            .rows
            .iter()
            .map(|r| row_from_hex(r, raw.b))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Ok(BitMatrix { rows, cols: raw.b })
    }
}
