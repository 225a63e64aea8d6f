use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ConditionKind, IndexedMessage, SyncParams, SyncViolation};
use crate::bitlinalg::{BitMatrix, BitVector};
use crate::edit_metric::{for_each_in_ball, within_distance, EditBallQuery};
use crate::error::{Error, Result};

/// Default work budget for [`verify_sync`], in (codeword, ball member) visits.
pub const DEFAULT_VERIFY_CAP: u128 = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Enumerate the edit ball around every nonzero codeword and aggregate by string.
    Fast,
    /// Enumerate every string of length `b ± r` and list-decode it against every matrix.
    Reference,
}

/// First witness found for each condition; `None` where the condition holds.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyncVerdict {
    pub condition1: Option<SyncViolation>,
    pub condition2: Option<SyncViolation>,
    pub condition3: Option<SyncViolation>,
}

impl SyncVerdict {
    pub fn passed(&self) -> bool {
        self.condition1.is_none() && self.condition2.is_none() && self.condition3.is_none()
    }

    /// The reported violation: rank failures first, then condition 1, then condition 2.
    pub fn first(&self) -> Option<&SyncViolation> {
        self.condition3.as_ref().or(self.condition1.as_ref()).or(self.condition2.as_ref())
    }

    pub fn kinds(&self) -> Vec<ConditionKind> {
        [&self.condition1, &self.condition2, &self.condition3]
            .into_iter()
            .flatten()
            .map(SyncViolation::kind)
            .collect()
    }

    pub fn into_result(self) -> std::result::Result<(), SyncViolation> {
        match self.first() {
            Some(v) => Err(v.clone()),
            None => Ok(()),
        }
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Upper bound on `|B(c, r)|` for `|c| = b`: choose `j` deleted positions, then `i`
/// inserted positions in the result and their values.
fn ball_size_bound(b: usize, r: usize) -> u128 {
    let (b, r) = (b as u128, r as u128);
    let mut total = 0u128;
    for i in 0..=r {
        for j in 0..=(r - i).min(b) {
            let term = binomial(b, j)
                .saturating_mul(binomial(b - j + i, i))
                .saturating_mul(1u128.checked_shl(i as u32).unwrap_or(u128::MAX));
            total = total.saturating_add(term);
        }
    }
    total
}

/// Work estimate checked against the cap before verification starts.
pub fn required_work(params: &SyncParams, strategy: Strategy) -> u128 {
    let r = params.radius();
    let messages = (1u128 << params.a) - 1;
    let per_matrix = match strategy {
        Strategy::Fast => messages.saturating_mul(ball_size_bound(params.b, r)),
        Strategy::Reference => {
            let strings: u128 = (params.b.saturating_sub(r)..=params.b + r)
                .map(|len| 1u128.checked_shl(len as u32).unwrap_or(u128::MAX))
                .fold(0, u128::saturating_add);
            strings.saturating_mul(messages)
        }
    };
    per_matrix.saturating_mul(params.n as u128)
}

pub fn verify_sync(params: &SyncParams, mats: &[BitMatrix]) -> Result<SyncVerdict> {
    verify_sync_with(params, mats, Strategy::Fast, DEFAULT_VERIFY_CAP)
}

pub fn verify_sync_with(params: &SyncParams, mats: &[BitMatrix], strategy: Strategy, cap: u128) -> Result<SyncVerdict> {
    params.validate()?;
    params.check_shape(mats)?;
    let required = required_work(params, strategy);
    if required > cap {
        return Err(Error::CapExceeded { what: "sync verification", required, cap });
    }
    if strategy == Strategy::Reference && params.b + params.radius() > 63 {
        return Err(Error::param("reference verification needs b + radius <= 63"));
    }
    let condition3 = mats.iter().enumerate().find_map(|(index, m)| {
        m.left_kernel_vector().map(|kernel| SyncViolation::Condition3 { index, kernel })
    });
    let (condition1, condition2) = match strategy {
        Strategy::Fast => fast_conditions(params, mats)?,
        Strategy::Reference => reference_conditions(params, mats),
    };
    Ok(SyncVerdict { condition1, condition2, condition3 })
}

fn nonzero_codewords(m: &BitMatrix) -> impl Iterator<Item = (u64, BitVector)> + '_ {
    let a = m.row_count();
    (1..1u64 << a).map(move |v| {
        let c = m.mul_left(&BitVector::from_u64(v, a)).expect("message length matches");
        (v, c)
    })
}

fn fast_conditions(params: &SyncParams, mats: &[BitMatrix]) -> Result<(Option<SyncViolation>, Option<SyncViolation>)> {
    let r = params.radius();
    let a = params.a;
    // v -> ascending nonzero messages x with d_e(x·S_i, v) <= r, one map per matrix
    let per_index: Vec<HashMap<BitVector, Vec<u64>>> = mats
        .par_iter()
        .map(|m| {
            let mut hits: HashMap<BitVector, Vec<u64>> = HashMap::new();
            for (x, c) in nonzero_codewords(m) {
                for_each_in_ball(&EditBallQuery::new(c, r), usize::MAX, |v| {
                    hits.entry(v.clone()).or_default().push(x);
                })?;
            }
            Ok(hits)
        })
        .collect::<Result<_>>()?;

    let condition2 = per_index
        .iter()
        .enumerate()
        .filter_map(|(index, hits)| {
            hits.iter()
                .filter(|(_, xs)| xs.len() > params.list_bound)
                .min_by(|p, q| p.0.cmp(q.0))
                .map(|(v, xs)| SyncViolation::Condition2 {
                    index,
                    v: v.clone(),
                    messages: xs[..=params.list_bound].iter().map(|&x| BitVector::from_u64(x, a)).collect(),
                })
        })
        .next();

    let mut owners: HashMap<&BitVector, Vec<(usize, u64)>> = HashMap::new();
    for (index, hits) in per_index.iter().enumerate() {
        for (v, xs) in hits {
            owners.entry(v).or_default().push((index, xs[0]));
        }
    }
    let condition1 = owners
        .into_iter()
        .filter(|(_, members)| members.len() > params.l)
        .min_by(|p, q| p.0.cmp(q.0))
        .map(|(v, members)| SyncViolation::Condition1 {
            v: v.clone(),
            members: members[..=params.l]
                .iter()
                .map(|&(index, x)| IndexedMessage { index, message: BitVector::from_u64(x, a) })
                .collect(),
        });
    Ok((condition1, condition2))
}

fn reference_conditions(params: &SyncParams, mats: &[BitMatrix]) -> (Option<SyncViolation>, Option<SyncViolation>) {
    let r = params.radius();
    let a = params.a;
    let tables: Vec<Vec<(u64, BitVector)>> = mats.iter().map(|m| nonzero_codewords(m).collect()).collect();
    let mut condition1 = None;
    let mut condition2 = None;
    for len in params.b.saturating_sub(r)..=params.b + r {
        for value in 0..1u64 << len {
            let v = BitVector::from_u64(value, len);
            let mut members = Vec::new();
            for (index, table) in tables.iter().enumerate() {
                let xs: Vec<u64> = table.iter().filter(|(_, c)| within_distance(c, &v, r)).map(|(x, _)| *x).collect();
                if xs.len() > params.list_bound && condition2.is_none() {
                    condition2 = Some(SyncViolation::Condition2 {
                        index,
                        v: v.clone(),
                        messages: xs[..=params.list_bound].iter().map(|&x| BitVector::from_u64(x, a)).collect(),
                    });
                }
                if let Some(&x) = xs.first() {
                    members.push(IndexedMessage { index, message: BitVector::from_u64(x, a) });
                }
            }
            if members.len() > params.l && condition1.is_none() {
                members.truncate(params.l + 1);
                condition1 = Some(SyncViolation::Condition1 { v: v.clone(), members });
            }
            if condition1.is_some() && condition2.is_some() {
                return (condition1, condition2);
            }
        }
    }
    (condition1, condition2)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum RowspaceVerdict {
    Pass,
    /// Nonzero `v` lying in the row spaces of all listed matrices.
    Violation { v: BitVector, indices: Vec<usize> },
}

/// Exact-alignment check: no nonzero vector lies in the row spaces of `l + 1`
/// distinct matrices. Hashes every nonzero codeword to the set of matrices producing it.
pub fn check_rowspace_condition(mats: &[BitMatrix], l: usize) -> Result<RowspaceVerdict> {
    if let Some(first) = mats.first() {
        for m in mats {
            Error::check_dim(first.row_count(), m.row_count())?;
            Error::check_dim(first.col_count(), m.col_count())?;
        }
    }
    if mats.len() <= l {
        return Ok(RowspaceVerdict::Pass);
    }
    let mut owners: HashMap<BitVector, Vec<usize>> = HashMap::new();
    for (index, m) in mats.iter().enumerate() {
        for (_, c) in nonzero_codewords(m) {
            if c.is_zero() {
                continue;
            }
            let entry = owners.entry(c).or_default();
            if entry.last() != Some(&index) {
                entry.push(index);
            }
        }
    }
    Ok(owners
        .into_iter()
        .filter(|(_, idx)| idx.len() > l)
        .min_by(|p, q| p.0.cmp(&q.0))
        .map_or(RowspaceVerdict::Pass, |(v, mut indices)| {
            indices.truncate(l + 1);
            RowspaceVerdict::Violation { v, indices }
        }))
}
