use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::file::{Provenance, SyncSequence, SyncStatus};
use super::verify::{required_work, verify_sync_with, Strategy, SyncVerdict};
use super::SyncParams;
use crate::bitlinalg::{random_matrix, BitMatrix, BitVector};
use crate::error::{Error, Result};
use crate::pseudorandom::{eps_biased_expand, kwise_sample, BiasedGeneratorSpec, KWiseSamplerSpec};
use crate::seed;

/// Attempt `t` of [`sample_sync`] draws `S_i` from
/// `random_matrix(a, b, seed::derive(seed, SAMPLE_STREAM_BASE + t, i))`.
pub const SAMPLE_STREAM_BASE: u64 = 0x5343_0000;

/// Number of failed attempts that violated each condition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationTallies {
    pub condition1: usize,
    pub condition2: usize,
    pub condition3: usize,
}

impl ViolationTallies {
    fn record(&mut self, verdict: &SyncVerdict) {
        self.condition1 += verdict.condition1.is_some() as usize;
        self.condition2 += verdict.condition2.is_some() as usize;
        self.condition3 += verdict.condition3.is_some() as usize;
    }
}

#[derive(Debug, Clone)]
pub enum SampleOutcome {
    Found { sequence: SyncSequence, attempts: usize, tallies: ViolationTallies },
    Failed { attempts: usize, tallies: ViolationTallies },
}

/// The `n` matrices of attempt `attempt` under `seed`.
pub fn sample_matrices(params: &SyncParams, seed: u64, attempt: usize) -> Vec<BitMatrix> {
    (0..params.n)
        .into_par_iter()
        .map(|i| {
            random_matrix(params.a, params.b, seed::derive(seed, SAMPLE_STREAM_BASE + attempt as u64, i as u64))
        })
        .collect()
}

/// Draws i.i.d. uniform sequences until one verifies or `max_retries` attempts fail.
pub fn sample_sync(params: &SyncParams, rng_seed: u64, max_retries: usize, cap: u128) -> Result<SampleOutcome> {
    params.validate()?;
    let required = required_work(params, Strategy::Fast);
    if required > cap {
        return Err(Error::CapExceeded { what: "sync verification", required, cap });
    }
    let mut tallies = ViolationTallies::default();
    for attempt in 0..max_retries {
        let mats = sample_matrices(params, rng_seed, attempt);
        let verdict = verify_sync_with(params, &mats, Strategy::Fast, cap)?;
        if verdict.passed() {
            let sequence = SyncSequence::new(*params, mats, SyncStatus::Verified)?
                .with_provenance(Provenance::Sampled { seed: rng_seed, attempt });
            return Ok(SampleOutcome::Found { sequence, attempts: attempt + 1, tallies });
        }
        tallies.record(&verdict);
    }
    Ok(SampleOutcome::Failed { attempts: max_retries, tallies })
}

/// Maps master seeds to candidate sequences.
pub trait SequenceSource: Sync {
    /// `log₂` of the number of master seeds; `None` for an empty seed space.
    fn seed_bits(&self) -> Option<usize>;

    fn sequence(&self, seed: u64) -> Result<Vec<BitMatrix>>;
}

/// `S_i = g(r_i)` reshaped row-major to `a × b`, where `r_1..r_n` come from an
/// `(l+1)`-wise independent sampler and `g` is the small-bias generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmallBiasSource {
    pub sampler: KWiseSamplerSpec,
    pub generator: BiasedGeneratorSpec,
    pub a: usize,
    pub b: usize,
}

impl SmallBiasSource {
    pub fn new(params: &SyncParams, generator: BiasedGeneratorSpec) -> Result<Self> {
        Error::check_dim(params.a * params.b, generator.output_len)?;
        let sampler = KWiseSamplerSpec::new(params.l + 1, params.n, generator.seed_len() as usize)?;
        Ok(SmallBiasSource { sampler, generator, a: params.a, b: params.b })
    }
}

impl SequenceSource for SmallBiasSource {
    fn seed_bits(&self) -> Option<usize> {
        self.sampler.seed_space_log2()
    }

    fn sequence(&self, seed: u64) -> Result<Vec<BitMatrix>> {
        let master = BitVector::from_u64(seed, self.sampler.seed_len());
        (0..self.sampler.domain_size)
            .map(|i| {
                let r = kwise_sample(&self.sampler, &master, i)?;
                let bits = eps_biased_expand(&self.generator, &r)?;
                BitMatrix::from_row_major(&bits, self.a, self.b)
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Found { sequence: SyncSequence, seed: u64 },
    Exhausted { seeds_tried: u64 },
}

/// Sweeps every master seed and returns the lowest one whose sequence verifies.
pub fn derandomized_search(
    params: &SyncParams,
    source: &impl SequenceSource,
    max_seed_bits: usize,
    cap: u128,
) -> Result<SearchOutcome> {
    params.validate()?;
    let Some(bits) = source.seed_bits() else {
        return Ok(SearchOutcome::Exhausted { seeds_tried: 0 });
    };
    if bits > max_seed_bits || bits > 63 {
        return Err(Error::CapExceeded {
            what: "master seed sweep",
            required: 1u128 << bits.min(127),
            cap: 1u128 << max_seed_bits.min(127),
        });
    }
    let required = required_work(params, Strategy::Fast);
    if required > cap {
        return Err(Error::CapExceeded { what: "sync verification", required, cap });
    }
    let seeds = 1u64 << bits;
    let hit = (0..seeds)
        .into_par_iter()
        .map(|seed| -> Result<Option<(u64, Vec<BitMatrix>)>> {
            let mats = source.sequence(seed)?;
            let passed = verify_sync_with(params, &mats, Strategy::Fast, cap)?.passed();
            Ok(passed.then_some((seed, mats)))
        })
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });
    match hit {
        None => Ok(SearchOutcome::Exhausted { seeds_tried: seeds }),
        Some(Err(e)) => Err(e),
        Some(Ok(found)) => {
            let (seed, mats) = found.expect("only hits are kept");
            let sequence =
                SyncSequence::new(*params, mats, SyncStatus::Verified)?.with_provenance(Provenance::Searched { seed });
            Ok(SearchOutcome::Found { sequence, seed })
        }
    }
}
