//! One matrix of a sync sequence viewed as a short binary linear code.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::bitlinalg::{mat_vec_mul, random_matrix, BitMatrix, BitVector};
use crate::edit_metric::{binary_entropy, for_each_in_ball, within_distance, EditBallQuery, DEFAULT_BALL_CAP};
use crate::error::{Error, Result};
use crate::seed;

/// Largest message length for which all codewords are tabulated.
pub const MAX_INNER_DIM: usize = 20;

pub const MAX_EXHAUSTIVE_DIM: usize = 16;
pub const MAX_EXHAUSTIVE_LEN: usize = 16;

/// A full-rank `a × b` generator with its codeword table.
#[derive(Debug, Clone)]
pub struct InnerCode {
    mat: BitMatrix,
    index: usize,
    // codewords[v] = x·S for x = BitVector::from_u64(v, a)
    codewords: Vec<BitVector>,
}

impl InnerCode {
    pub fn new(mat: BitMatrix, index: usize) -> Result<Self> {
        let a = mat.row_count();
        if a > MAX_INNER_DIM {
            return Err(Error::param(format!("inner dimension {a} exceeds {MAX_INNER_DIM}")));
        }
        let rank = mat.rank();
        if rank != a {
            return Err(Error::RankDeficient { rank, rows: a });
        }
        let codewords = (0..1u64 << a)
            .map(|v| mat_vec_mul(&BitVector::from_u64(v, a), &mat))
            .collect::<Result<_>>()?;
        Ok(InnerCode { mat, index, codewords })
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.mat
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn dim(&self) -> usize {
        self.mat.row_count()
    }

    pub fn len(&self) -> usize {
        self.mat.col_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn encode(&self, x: &BitVector) -> Result<BitVector> {
        Error::check_dim(self.dim(), x.len())?;
        Ok(self.codewords[x.to_u64().expect("a <= 20") as usize].clone())
    }

    /// All nonzero `x` with `d_e(x·S, y) ≤ radius`, ascending by integer value.
    ///
    /// The zero message is never reported; the decoder adds it to every box itself.
    pub fn list_decode(&self, y: &BitVector, radius: usize) -> Vec<BitVector> {
        if y.len().abs_diff(self.len()) > radius {
            return Vec::new();
        }
        let a = self.dim();
        self.codewords
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, c)| within_distance(c, y, radius))
            .map(|(v, _)| BitVector::from_u64(v as u64, a))
            .collect()
    }
}

pub fn inner_encode(code: &InnerCode, x: &BitVector) -> Result<BitVector> {
    code.encode(x)
}

pub fn inner_list_decode(code: &InnerCode, y: &BitVector, radius: usize) -> Vec<BitVector> {
    code.list_decode(y, radius)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListDecodability {
    pub max_list_size: usize,
    /// Smallest received word (length first, then lexicographic) attaining the max.
    pub argmax: BitVector,
}

/// `max_y |{x : d_e(x·G, y) ≤ radius}|` over all received words `y`, zero message
/// included, by aggregating the balls around all `2^k` codewords.
pub fn measure_list_decodability(g: &BitMatrix, radius: usize) -> Result<ListDecodability> {
    let (k, n) = (g.row_count(), g.col_count());
    if k > MAX_EXHAUSTIVE_DIM || n > MAX_EXHAUSTIVE_LEN {
        return Err(Error::param(format!(
            "list decodability measurement limited to k <= {MAX_EXHAUSTIVE_DIM}, n <= {MAX_EXHAUSTIVE_LEN}"
        )));
    }
    let mut hits: HashMap<BitVector, usize> = HashMap::new();
    for v in 0..1u64 << k {
        let codeword = mat_vec_mul(&BitVector::from_u64(v, k), g)?;
        for_each_in_ball(&EditBallQuery::new(codeword, radius), DEFAULT_BALL_CAP, |y| {
            *hits.entry(y.clone()).or_default() += 1;
        })?;
    }
    let max_list_size = hits.values().copied().max().unwrap_or(0);
    let argmax = hits
        .into_iter()
        .filter(|&(_, c)| c == max_list_size)
        .map(|(y, _)| y)
        .min()
        .unwrap_or_default();
    Ok(ListDecodability { max_list_size, argmax })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CapacityReport {
    pub k: usize,
    pub n: usize,
    pub radius: usize,
    pub trials: usize,
    pub list_bound: usize,
    pub seed: u64,
    pub failures: usize,
    pub empirical_failure: f64,
    /// `2^{-0.5n+1}`.
    pub lemma_bound: f64,
    pub rate: f64,
    /// `1 − 5H(radius/n) − ε` with `ε = 2 / (log₂ L − 1)`; `None` when `L ≤ 2`.
    pub rate_bound: Option<f64>,
    pub rate_condition_holds: bool,
    /// True when the rate bound is non-positive (or undefined), so the lemma says nothing.
    pub vacuous: bool,
    pub max_list_histogram: BTreeMap<usize, usize>,
    pub per_trial_max: Vec<usize>,
}

/// Trial `t` uses `random_matrix(k, n, seed::derive(seed, CAPACITY_STREAM, t))`.
pub const CAPACITY_STREAM: u64 = 0xca9a;

pub fn capacity_trial_matrix(k: usize, n: usize, seed: u64, trial: usize) -> BitMatrix {
    random_matrix(k, n, seed::derive(seed, CAPACITY_STREAM, trial as u64))
}

pub fn capacity_experiment(
    k: usize,
    n: usize,
    radius: usize,
    trials: usize,
    list_bound: usize,
    rng_seed: u64,
) -> Result<CapacityReport> {
    if n == 0 {
        return Err(Error::param("code length must be positive"));
    }
    let per_trial_max = (0..trials)
        .map(|t| measure_list_decodability(&capacity_trial_matrix(k, n, rng_seed, t), radius).map(|r| r.max_list_size))
        .collect::<Result<Vec<_>>>()?;
    let mut max_list_histogram = BTreeMap::new();
    for &m in &per_trial_max {
        *max_list_histogram.entry(m).or_insert(0) += 1;
    }
    let failures = per_trial_max.iter().filter(|&&m| m > list_bound).count();
    let delta = radius as f64 / n as f64;
    let rate_bound = if list_bound > 2 && delta < 0.5 {
        let eps = 2.0 / ((list_bound as f64).log2() - 1.0);
        Some(1.0 - 5.0 * binary_entropy(delta)? - eps)
    } else {
        None
    };
    let rate = k as f64 / n as f64;
    Ok(CapacityReport {
        k,
        n,
        radius,
        trials,
        list_bound,
        seed: rng_seed,
        failures,
        empirical_failure: if trials == 0 { 0.0 } else { failures as f64 / trials as f64 },
        lemma_bound: (1.0 - 0.5 * n as f64).exp2(),
        rate,
        rate_bound,
        rate_condition_holds: rate_bound.is_some_and(|r| rate <= r),
        vacuous: rate_bound.is_none_or(|r| r <= 0.0),
        max_list_histogram,
        per_trial_max,
    })
}
