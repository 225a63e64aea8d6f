//! Sync matrix sequences: definition, verification, and construction.
//!
//! A sequence `S_1, …, S_n` of `a × b` binary matrices is `(δ, l, L)`-sync when, with
//! `r = ⌊δb⌋`:
//!
//! 1. no string `v` lies within edit distance `r` of nonzero codewords `x_j·S_{i_j}`
//!    of `l + 1` distinct matrices;
//! 2. for every `i` and `v`, at most `L` nonzero `x` have `d_e(x·S_i, v) ≤ r`;
//! 3. every `S_i` has full row rank.

mod file;
mod search;
mod verify;

use serde::{Deserialize, Serialize};

use crate::bitlinalg::{BitMatrix, BitVector};
use crate::edit_metric::within_distance;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

pub use file::{content_hash, Provenance, SyncSequence, SyncStatus};
pub use search::{
    derandomized_search, sample_matrices, sample_sync, SampleOutcome, SearchOutcome, SequenceSource, SmallBiasSource,
    ViolationTallies, SAMPLE_STREAM_BASE,
};
pub use verify::{
    check_rowspace_condition, required_work, verify_sync, verify_sync_with, RowspaceVerdict, Strategy, SyncVerdict,
    DEFAULT_VERIFY_CAP,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyncParams {
    pub n: usize,
    pub a: usize,
    pub b: usize,
    #[serde(with = "rational::serde_str")]
    pub delta: Rational,
    pub l: usize,
    #[serde(rename = "L")]
    pub list_bound: usize,
}

impl SyncParams {
    pub fn new(n: usize, a: usize, b: usize, delta: Rational, l: usize, list_bound: usize) -> Result<Self> {
        let p = SyncParams { n, a, b, delta, l, list_bound };
        p.validate()?;
        Ok(p)
    }

    /// `⌊δb⌋`.
    pub fn radius(&self) -> usize {
        rational::floor_mul(&self.delta, self.b as u64) as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.a == 0 || self.a > self.b {
            return Err(Error::param(format!("sync params need 1 <= a <= b, got a = {}, b = {}", self.a, self.b)));
        }
        if self.l == 0 || self.list_bound == 0 {
            return Err(Error::param("sync params need l >= 1 and L >= 1"));
        }
        if self.radius() > self.b {
            return Err(Error::param(format!("radius {} exceeds b = {}", self.radius(), self.b)));
        }
        if self.a > crate::inner_code::MAX_INNER_DIM {
            return Err(Error::param(format!("a = {} exceeds supported {}", self.a, crate::inner_code::MAX_INNER_DIM)));
        }
        Ok(())
    }

    /// Same sequence shape with a different `δ`.
    pub fn with_delta(&self, delta: Rational) -> Self {
        SyncParams { delta, ..*self }
    }

    pub fn check_shape(&self, mats: &[BitMatrix]) -> Result<()> {
        Error::check_dim(self.n, mats.len())?;
        for m in mats {
            Error::check_dim(self.a, m.row_count())?;
            Error::check_dim(self.b, m.col_count())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionKind {
    Condition1,
    Condition2,
    Condition3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexedMessage {
    pub index: usize,
    pub message: BitVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SyncViolation {
    /// `v` is within the radius of nonzero codewords of `l + 1` distinct matrices.
    Condition1 { v: BitVector, members: Vec<IndexedMessage> },
    /// More than `L` nonzero messages of matrix `index` land within the radius of `v`.
    Condition2 { index: usize, v: BitVector, messages: Vec<BitVector> },
    /// `kernel · S_index = 0` with `kernel ≠ 0`.
    Condition3 { index: usize, kernel: BitVector },
}

impl SyncViolation {
    pub fn kind(&self) -> ConditionKind {
        match self {
            SyncViolation::Condition1 { .. } => ConditionKind::Condition1,
            SyncViolation::Condition2 { .. } => ConditionKind::Condition2,
            SyncViolation::Condition3 { .. } => ConditionKind::Condition3,
        }
    }

    /// Checks the witness against the matrices directly with the edit distance.
    pub fn revalidate(&self, params: &SyncParams, mats: &[BitMatrix]) -> bool {
        let r = params.radius();
        let codeword = |i: usize, x: &BitVector| mats.get(i).and_then(|m| m.mul_left(x).ok());
        match self {
            SyncViolation::Condition1 { v, members } => {
                let mut indices: Vec<usize> = members.iter().map(|m| m.index).collect();
                indices.sort_unstable();
                indices.dedup();
                indices.len() == members.len()
                    && members.len() > params.l
                    && members.iter().all(|m| {
                        !m.message.is_zero()
                            && codeword(m.index, &m.message).is_some_and(|c| within_distance(&c, v, r))
                    })
            }
            SyncViolation::Condition2 { index, v, messages } => {
                let mut distinct = messages.clone();
                distinct.sort();
                distinct.dedup();
                distinct.len() == messages.len()
                    && messages.len() > params.list_bound
                    && messages.iter().all(|x| {
                        !x.is_zero() && codeword(*index, x).is_some_and(|c| within_distance(&c, v, r))
                    })
            }
            SyncViolation::Condition3 { index, kernel } => {
                !kernel.is_zero() && codeword(*index, kernel).is_some_and(|c| c.is_zero())
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyncRateReport {
    #[serde(with = "rational::serde_str")]
    pub rate: Rational,
    /// `l / (l + 1)`.
    #[serde(with = "rational::serde_str")]
    pub ceiling: Rational,
    /// `(l + 1)·a − l·b ≤ 0`.
    pub within_bound: bool,
}

pub fn sync_rate_bound(params: &SyncParams) -> SyncRateReport {
    let (a, b, l) = (params.a as u64, params.b as u64, params.l as u64);
    SyncRateReport {
        rate: Rational::new(a, b.max(1)),
        ceiling: Rational::new(l, l + 1),
        within_bound: (l + 1) * a <= l * b,
    }
}
