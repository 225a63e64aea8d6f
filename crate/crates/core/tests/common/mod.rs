#![allow(dead_code)]

use std::path::PathBuf;

use listedit::codec::{ConcatCode, ConcatParams};
use listedit::outer_code::OuterCodeSpec;
use listedit::sync::{SyncParams, SyncSequence};
use listedit::BitVector;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/desk")
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_dir().join(name)).unwrap()
}

pub struct Desk {
    pub params: ConcatParams,
    pub sync_params: SyncParams,
    pub sync: SyncSequence,
    pub outer: OuterCodeSpec,
    pub code: ConcatCode,
}

pub fn desk() -> Desk {
    let params: ConcatParams = serde_json::from_str(&read_fixture("concat_params.json")).unwrap();
    let sync_params: SyncParams = serde_json::from_str(&read_fixture("sync_params.json")).unwrap();
    let sync = SyncSequence::from_json(&read_fixture("sync.json")).unwrap();
    let outer: OuterCodeSpec = serde_json::from_str(&read_fixture("outer.json")).unwrap();
    let code = ConcatCode::new(params, &sync, outer).unwrap();
    Desk { params, sync_params, sync, outer, code }
}

pub fn bools(v: &BitVector) -> Vec<bool> {
    v.iter().collect()
}

/// Insertion/deletion distance by the textbook recurrence, no LCS shortcut.
pub fn oracle_distance(x: &[bool], y: &[bool]) -> usize {
    let mut d = vec![vec![0usize; y.len() + 1]; x.len() + 1];
    for i in 0..=x.len() {
        for j in 0..=y.len() {
            d[i][j] = if i == 0 {
                j
            } else if j == 0 {
                i
            } else {
                let mut best = (d[i - 1][j] + 1).min(d[i][j - 1] + 1);
                if x[i - 1] == y[j - 1] {
                    best = best.min(d[i - 1][j - 1]);
                }
                best
            };
        }
    }
    d[x.len()][y.len()]
}

pub fn oracle_distance_bv(x: &BitVector, y: &BitVector) -> usize {
    oracle_distance(&bools(x), &bools(y))
}

/// Every string of length `len`, as bool vectors with bit 0 first.
pub fn all_strings(len: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1u64 << len).map(move |v| (0..len).map(|i| v >> i & 1 == 1).collect())
}

pub fn to_bv(bits: &[bool]) -> BitVector {
    BitVector::from_bools(bits)
}

pub fn entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

/// Row-vector times matrix over GF(2), computed bit by bit.
pub fn oracle_mul(x: &[bool], rows: &[Vec<bool>]) -> Vec<bool> {
    let cols = rows.first().map_or(0, Vec::len);
    (0..cols).map(|c| rows.iter().zip(x).filter(|(r, &xi)| xi && r[c]).count() % 2 == 1).collect()
}

pub fn matrix_rows(m: &listedit::BitMatrix) -> Vec<Vec<bool>> {
    m.rows().iter().map(bools).collect()
}

/// Small deterministic generator for test inputs (xorshift64*).
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) | 1)
    }

    pub fn next(&mut self) -> u64 {
        self.0 ^= self.0 >> 12;
        self.0 ^= self.0 << 25;
        self.0 ^= self.0 >> 27;
        self.0.wrapping_mul(0x2545_f491_4f6c_dd1d)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }

    pub fn bits(&mut self, len: usize) -> Vec<bool> {
        (0..len).map(|_| self.next() >> 63 == 1).collect()
    }
}
