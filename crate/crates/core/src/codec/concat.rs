use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::params::ConcatParams;
use crate::bitlinalg::BitVector;
use crate::error::{Error, Result};
use crate::inner_code::InnerCode;
use crate::outer_code::{fold_symbols, unfold_symbols, OuterCode, OuterCodeSpec, RecoveryInput};
use crate::rational::Rational;
use crate::sync::SyncSequence;

/// Windows `[s, s + b)` for `s = 0, t, 2t, …` while `s < len`, truncated at `len`.
pub fn window_plan(b: usize, t: usize, len: usize) -> Vec<Range<usize>> {
    assert!(t > 0, "window step must be positive");
    (0..len).step_by(t).map(|s| s..(s + b).min(len)).collect()
}

/// The outer code composed with a verified sync sequence.
#[derive(Debug, Clone)]
pub struct ConcatCode {
    params: ConcatParams,
    inner: Vec<InnerCode>,
    outer: OuterCode,
    sync_hash: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Codeword {
    /// Outer codeword, one integer per recovery position.
    pub positions: Vec<u64>,
    pub blocks: Vec<BitVector>,
}

impl Codeword {
    pub fn bits(&self) -> BitVector {
        BitVector::concat(&self.blocks)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockHit {
    pub block: usize,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowHits {
    pub start: usize,
    pub len: usize,
    pub hits: Vec<BlockHit>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageTimings {
    pub inner_us: u128,
    pub outer_us: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeReport {
    pub received_len: usize,
    pub window_count: usize,
    /// Windows with at least one hit.
    pub windows: Vec<WindowHits>,
    pub max_blocks_per_window: usize,
    pub max_vectors_per_block_window: usize,
    /// Nonzero insertions summed over windows, before deduplication.
    pub total_insertions: usize,
    /// Box sizes after adding zero and before emptying.
    pub box_sizes: Vec<usize>,
    pub box_histogram: BTreeMap<usize, usize>,
    pub emptied: Vec<usize>,
    pub emptied_count: usize,
    /// Per-window counts stayed within `l` blocks and `L` vectors.
    pub window_bounds_hold: bool,
    pub outputs: usize,
    pub timings: StageTimings,
}

#[derive(Debug, Clone)]
pub struct StageOne {
    /// Candidate inner messages per block, zero included.
    pub boxes: Vec<BTreeSet<BitVector>>,
    pub window_count: usize,
    pub windows: Vec<WindowHits>,
    pub max_blocks_per_window: usize,
    pub max_vectors_per_block_window: usize,
    pub total_insertions: usize,
}

#[derive(Debug, Clone)]
pub struct DecodeOutput {
    pub messages: Vec<BitVector>,
    pub report: DecodeReport,
}

impl ConcatCode {
    pub fn new(params: ConcatParams, sync: &SyncSequence, outer: OuterCodeSpec) -> Result<Self> {
        params.validate()?;
        if !sync.is_verified() {
            return Err(Error::SyncMismatch("sync sequence is not verified".into()));
        }
        let sp = params.sync_params();
        let q = sync.params;
        if (q.n, q.a, q.b, q.l, q.list_bound) != (sp.n, sp.a, sp.b, sp.l, sp.list_bound) {
            return Err(Error::SyncMismatch(format!(
                "sequence has (n, a, b, l, L) = ({}, {}, {}, {}, {}), code needs ({}, {}, {}, {}, {})",
                q.n, q.a, q.b, q.l, q.list_bound, sp.n, sp.a, sp.b, sp.l, sp.list_bound
            )));
        }
        if q.radius() < params.threshold {
            return Err(Error::SyncMismatch(format!(
                "sequence radius {} is below the decoding threshold {}",
                q.radius(),
                params.threshold
            )));
        }
        let outer = OuterCode::new(outer)?;
        let spec = outer.spec();
        Error::check_dim(params.n, spec.positions())?;
        let pb = spec.position_bits();
        if pb > params.a || (pb < params.a && !params.allow_padding) {
            return Err(Error::param(format!(
                "outer positions carry {pb} bits but inner messages have {} (padding {})",
                params.a,
                if params.allow_padding { "allowed" } else { "not allowed" }
            )));
        }
        if spec.recovery.box_limit < params.box_limit {
            return Err(Error::param(format!(
                "outer recovery accepts boxes up to {}, decoder keeps up to {}",
                spec.recovery.box_limit, params.box_limit
            )));
        }
        Ok(ConcatCode { params, inner: sync.inner_codes()?, outer, sync_hash: sync.hash() })
    }

    pub fn params(&self) -> &ConcatParams {
        &self.params
    }

    pub fn outer(&self) -> &OuterCode {
        &self.outer
    }

    pub fn sync_hash(&self) -> &str {
        &self.sync_hash
    }

    pub fn message_bits(&self) -> usize {
        self.outer.spec().message_bits()
    }

    pub fn codeword_bits(&self) -> usize {
        self.params.n * self.params.b
    }

    pub fn rate(&self) -> Rational {
        Rational::new(self.message_bits() as u64, self.codeword_bits() as u64)
    }

    pub fn encode(&self, message: &BitVector) -> Result<Codeword> {
        let spec = self.outer.spec();
        Error::check_dim(self.message_bits(), message.len())?;
        let symbols = fold_symbols(message, spec.symbol_bits, false)?;
        let positions = self.outer.fold_codeword(&self.outer.encode(&symbols)?);
        let blocks = positions
            .iter()
            .zip(&self.inner)
            .map(|(&v, code)| code.encode(&self.position_message(v)))
            .collect::<Result<_>>()?;
        Ok(Codeword { positions, blocks })
    }

    // outer position value, MSB first, then zero padding up to `a`
    fn position_message(&self, v: u64) -> BitVector {
        let pb = self.outer.spec().position_bits();
        let mut x = BitVector::from_msb_first(v, pb);
        x.extend_from(&BitVector::zeros(self.params.a - pb));
        x
    }

    /// Stage 1 at an arbitrary threshold: window scanning plus the zero vector in
    /// every box, before oversized boxes are emptied. Not limited by the sync radius.
    pub fn stage_one(&self, y: &BitVector, threshold: usize) -> StageOne {
        let p = &self.params;
        let plan = window_plan(p.b, p.window_step, y.len());
        let per_window: Vec<Vec<(usize, Vec<BitVector>)>> = plan
            .par_iter()
            .map(|w| {
                let yw = y.slice(w.start, w.end).expect("window inside string");
                self.inner
                    .iter()
                    .enumerate()
                    .map(|(j, code)| (j, code.list_decode(&yw, threshold)))
                    .filter(|(_, xs)| !xs.is_empty())
                    .collect()
            })
            .collect();

        let mut boxes: Vec<BTreeSet<BitVector>> = vec![BTreeSet::new(); p.n];
        let mut windows = Vec::new();
        let (mut max_blocks, mut max_vectors, mut total) = (0, 0, 0);
        for (w, hits) in plan.iter().zip(per_window) {
            if hits.is_empty() {
                continue;
            }
            max_blocks = max_blocks.max(hits.len());
            let mut entry = WindowHits { start: w.start, len: w.len(), hits: Vec::new() };
            for (j, xs) in hits {
                max_vectors = max_vectors.max(xs.len());
                total += xs.len();
                entry.hits.push(BlockHit { block: j, count: xs.len() });
                boxes[j].extend(xs);
            }
            windows.push(entry);
        }
        for b in &mut boxes {
            b.insert(BitVector::zeros(p.a));
        }
        StageOne {
            boxes,
            window_count: plan.len(),
            windows,
            max_blocks_per_window: max_blocks,
            max_vectors_per_block_window: max_vectors,
            total_insertions: total,
        }
    }

    /// The inner message carried by each block of the codeword for `message`.
    pub fn inner_messages(&self, message: &BitVector) -> Result<Vec<BitVector>> {
        Ok(self.encode(message)?.positions.iter().map(|&v| self.position_message(v)).collect())
    }

    /// List decoding of a received string: windowed inner list decoding into boxes,
    /// then outer list recovery.
    pub fn decode(&self, y: &BitVector) -> Result<DecodeOutput> {
        let p = &self.params;
        let started = Instant::now();
        let StageOne {
            mut boxes,
            window_count,
            windows,
            max_blocks_per_window: max_blocks,
            max_vectors_per_block_window: max_vectors,
            total_insertions: total,
        } = self.stage_one(y, p.threshold);
        let box_sizes: Vec<usize> = boxes.iter().map(BTreeSet::len).collect();
        let mut box_histogram = BTreeMap::new();
        for &s in &box_sizes {
            *box_histogram.entry(s).or_insert(0) += 1;
        }
        let mut emptied = Vec::new();
        for (j, b) in boxes.iter_mut().enumerate() {
            if b.len() > p.box_limit {
                b.clear();
                emptied.push(j);
            }
        }
        let inner_us = started.elapsed().as_micros();

        let started = Instant::now();
        let spec = self.outer.spec();
        let pb = spec.position_bits();
        let position_boxes = boxes
            .iter()
            .map(|b| {
                b.iter()
                    .filter(|x| (pb..p.a).all(|i| !x.bit(i)))
                    .map(|x| x.slice(0, pb).expect("pb <= a").to_msb_first().expect("pb <= 64"))
                    .collect()
            })
            .collect();
        let found = self.outer.list_recover(&RecoveryInput { boxes: position_boxes, alpha: spec.recovery.alpha })?;
        let messages = found
            .iter()
            .map(|m| unfold_symbols(m, spec.symbol_bits, self.message_bits()))
            .collect::<Result<Vec<_>>>()?;
        let outer_us = started.elapsed().as_micros();

        let report = DecodeReport {
            received_len: y.len(),
            window_count,
            windows,
            max_blocks_per_window: max_blocks,
            max_vectors_per_block_window: max_vectors,
            total_insertions: total,
            box_sizes,
            box_histogram,
            emptied_count: emptied.len(),
            emptied,
            window_bounds_hold: max_blocks <= p.l && max_vectors <= p.list_bound,
            outputs: messages.len(),
            timings: StageTimings { inner_us, outer_us },
        };
        Ok(DecodeOutput { messages, report })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateReport {
    #[serde(with = "crate::rational::serde_str")]
    pub achieved: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub inner_rate: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub outer_rate: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<f64>,
}

/// Achieved rate `k·a′ / (n·b)`, with the asymptotic bound when `γ` is known.
pub fn overall_rate(params: &ConcatParams, outer: &OuterCodeSpec, c1: f64) -> Result<RateReport> {
    let achieved = Rational::new(outer.message_bits() as u64, (params.n * params.b) as u64);
    let lower_bound = params.gamma.map(|g| super::params::rate_lower_bound_formula(&g, c1)).transpose()?;
    Ok(RateReport {
        achieved,
        inner_rate: Rational::new(params.a as u64, params.b as u64),
        outer_rate: outer.rate(),
        lower_bound,
    })
}
