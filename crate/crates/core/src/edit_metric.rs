//! Insertion/deletion distance and edit balls over binary strings.
//!
//! A substitution is not a primitive operation here: it costs one deletion plus one
//! insertion, so `d_e(x, y) = |x| + |y| − 2·LCS(x, y)`.

use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitlinalg::BitVector;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Default bound on the number of strings a ball enumeration may materialize.
pub const DEFAULT_BALL_CAP: usize = 1 << 24;

/// Largest length for which [`check_ball_size_bound`] sweeps all strings.
pub const MAX_EXHAUSTIVE_LEN: usize = 16;

pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("entropy argument {p} outside [0, 1]")));
    }
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    Ok(-p * p.log2() - (1.0 - p) * (1.0 - p).log2())
}

pub fn binary_entropy_rational(p: &Rational) -> Result<f64> {
    binary_entropy(rational::to_f64(p))
}

/// Length of a longest common subsequence.
pub fn lcs_len(x: &BitVector, y: &BitVector) -> usize {
    let (short, long) = if x.len() <= y.len() { (x, y) } else { (y, x) };
    let mut row = vec![0u32; short.len() + 1];
    for lb in long.iter() {
        let mut diag = 0u32;
        for j in 0..short.len() {
            let up = row[j + 1];
            row[j + 1] = if short.bit(j) == lb { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[short.len()] as usize
}

pub fn edit_distance(x: &BitVector, y: &BitVector) -> usize {
    x.len() + y.len() - 2 * lcs_len(x, y)
}

/// `d_e(x, y) <= radius`, with a cheap length-gap rejection first.
pub fn within_distance(x: &BitVector, y: &BitVector, radius: usize) -> bool {
    x.len().abs_diff(y.len()) <= radius && edit_distance(x, y) <= radius
}

/// `B(center, radius)`, optionally intersected with strings of one length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditBallQuery {
    pub center: BitVector,
    pub radius: usize,
    pub length_filter: Option<usize>,
}

impl EditBallQuery {
    pub fn new(center: BitVector, radius: usize) -> Self {
        EditBallQuery { center, radius, length_filter: None }
    }

    pub fn with_length(mut self, len: usize) -> Self {
        self.length_filter = Some(len);
        self
    }

    pub fn contains(&self, x: &BitVector) -> bool {
        ball_membership(x, self)
    }
}

pub fn ball_membership(x: &BitVector, q: &EditBallQuery) -> bool {
    q.length_filter.is_none_or(|n| x.len() == n) && within_distance(x, &q.center, q.radius)
}

/// Every string in the ball, by breadth-first closure under single insertions and
/// deletions.
///
/// `cap` bounds the number of distinct strings visited (including intermediate
/// strings of other lengths when a length filter is set); exceeding it is an error.
pub fn ball_enumerate(q: &EditBallQuery, cap: usize) -> Result<BTreeSet<BitVector>> {
    let mut out = BTreeSet::new();
    for_each_in_ball(q, cap, |v| {
        out.insert(v.clone());
    })?;
    Ok(out)
}

/// Calls `visit` once per member of the ball, in unspecified order.
pub fn for_each_in_ball(q: &EditBallQuery, cap: usize, mut visit: impl FnMut(&BitVector)) -> Result<()> {
    let reachable = |len: usize, budget: usize| q.length_filter.is_none_or(|n| len.abs_diff(n) <= budget);
    if !reachable(q.center.len(), q.radius) {
        return Ok(());
    }
    let mut seen: HashSet<BitVector> = HashSet::new();
    seen.insert(q.center.clone());
    let mut frontier = vec![q.center.clone()];
    for depth in 0..q.radius {
        let budget = q.radius - depth - 1;
        let mut next = Vec::new();
        for s in &frontier {
            if !s.is_empty() && reachable(s.len() - 1, budget) {
                for pos in 0..s.len() {
                    // Deleting any bit of a run gives the same string; take the run's first.
                    if pos > 0 && s.bit(pos) == s.bit(pos - 1) {
                        continue;
                    }
                    let child = s.with_removed(pos)?;
                    if seen.insert(child.clone()) {
                        next.push(child);
                    }
                }
            }
            if reachable(s.len() + 1, budget) {
                for pos in 0..=s.len() {
                    for bit in [false, true] {
                        let child = s.with_inserted(pos, bit)?;
                        if seen.insert(child.clone()) {
                            next.push(child);
                        }
                    }
                }
            }
            if seen.len() > cap {
                return Err(Error::CapExceeded {
                    what: "edit ball enumeration",
                    required: seen.len() as u128,
                    cap: cap as u128,
                });
            }
        }
        frontier = next;
    }
    for v in &seen {
        if q.length_filter.is_none_or(|n| v.len() == n) {
            visit(v);
        }
    }
    Ok(())
}

/// `|B_n(center, radius)|`, counted by sweeping every length-`n` string.
pub fn ball_size_exact(center: &BitVector, n: usize, radius: usize) -> Result<u64> {
    if n > MAX_EXHAUSTIVE_LEN {
        return Err(Error::param(format!("exhaustive ball size needs n <= {MAX_EXHAUSTIVE_LEN}, got {n}")));
    }
    if center.len().abs_diff(n) > radius {
        return Ok(0);
    }
    Ok((0..1u64 << n)
        .filter(|&v| within_distance(&BitVector::from_u64(v, n), center, radius))
        .count() as u64)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallBoundReport {
    pub n: usize,
    #[serde(with = "rational::serde_str")]
    pub delta: Rational,
    pub radius: usize,
    pub trials: usize,
    pub seed: u64,
    pub max_ball_size: u64,
    pub argmax_center: Option<BitVector>,
    /// `5·H(δ)·n`, the exponent of the bound.
    pub bound_log2: f64,
    pub pass: bool,
}

/// Samples `trials` centers with lengths uniform in `[n − ⌊δn⌋, n + ⌊δn⌋]` and
/// checks `|B_n(y, ⌊δn⌋)| ≤ 2^{5H(δ)n}` on each by exact counting.
pub fn check_ball_size_bound(n: usize, delta: &Rational, trials: usize, seed: u64) -> Result<BallBoundReport> {
    if *delta > Rational::new(1, 2) {
        return Err(Error::param(format!("ball bound requires delta <= 1/2, got {}", rational::format(delta))));
    }
    if n > MAX_EXHAUSTIVE_LEN {
        return Err(Error::param(format!("ball bound check needs n <= {MAX_EXHAUSTIVE_LEN}, got {n}")));
    }
    let radius = rational::floor_mul(delta, n as u64) as usize;
    let bound_log2 = 5.0 * binary_entropy_rational(delta)? * n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ball_size = 0;
    let mut argmax_center = None;
    for _ in 0..trials {
        let len = rng.random_range(n - radius..=n + radius);
        let bits: Vec<bool> = (0..len).map(|_| rng.random()).collect();
        let center = BitVector::from_bools(&bits);
        let size = ball_size_exact(&center, n, radius)?;
        if argmax_center.is_none() || size > max_ball_size {
            max_ball_size = size;
            argmax_center = Some(center);
        }
    }
    let pass = (max_ball_size as f64) <= bound_log2.exp2();
    Ok(BallBoundReport {
        n,
        delta: *delta,
        radius,
        trials,
        seed,
        max_ball_size,
        argmax_center,
        bound_log2,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn strings(set: &BTreeSet<BitVector>) -> Vec<String> {
        set.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-12);
        assert!((binary_entropy(0.25).unwrap() - 0.811278).abs() < 1e-6);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(edit_distance(&bv("0101"), &bv("0101")), 0);
        assert_eq!(edit_distance(&bv(""), &bv("111")), 3);
        assert_eq!(edit_distance(&bv("01"), &bv("10")), 2);
        assert_eq!(edit_distance(&bv("0101"), &bv("011")), 1);
    }

    #[test]
    fn membership_examples() {
        assert!(ball_membership(&bv("0110"), &EditBallQuery::new(bv("0110"), 0)));
        assert!(!ball_membership(&bv("1"), &EditBallQuery::new(bv("0"), 1)));
        assert!(ball_membership(&bv(""), &EditBallQuery::new(bv("0"), 1)));
        assert!(!ball_membership(&bv(""), &EditBallQuery::new(bv("0"), 1).with_length(1)));
    }

    #[test]
    fn enumerate_examples() {
        let cap = DEFAULT_BALL_CAP;
        assert_eq!(strings(&ball_enumerate(&EditBallQuery::new(bv("01"), 0), cap).unwrap()), ["01"]);
        assert_eq!(
            strings(&ball_enumerate(&EditBallQuery::new(bv("0"), 1), cap).unwrap()),
            ["", "0", "00", "01", "10"]
        );
        assert_eq!(
            strings(&ball_enumerate(&EditBallQuery::new(bv("0"), 1).with_length(1), cap).unwrap()),
            ["0"]
        );
        assert!(ball_enumerate(&EditBallQuery::new(bv("000"), 5).with_length(0), cap)
            .unwrap()
            .contains(&bv("")));
    }

    #[test]
    fn enumerate_respects_cap() {
        let err = ball_enumerate(&EditBallQuery::new(bv("0101"), 3), 10).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { cap: 10, .. }));
    }

    #[test]
    fn ball_bound_examples() {
        let r = check_ball_size_bound(8, &Rational::from_integer(0), 20, 1).unwrap();
        assert_eq!(r.max_ball_size, 1);
        assert!(r.pass);
        assert_eq!(ball_size_exact(&bv("01"), 10, 2).unwrap(), 0);
        assert!(check_ball_size_bound(8, &Rational::new(3, 5), 1, 0).is_err());
        assert!(check_ball_size_bound(17, &Rational::new(1, 5), 1, 0).is_err());
    }
}
