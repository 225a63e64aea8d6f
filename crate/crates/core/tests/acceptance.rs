//! Acceptance criteria. Each criterion prints one PASS/FAIL line with its wall time;
//! the test fails if any criterion fails.

mod common;

use std::collections::{BTreeSet, HashMap};
use std::io::Write;
use std::time::{Duration, Instant};

use common::*;
use listedit::codec::{corrupt_blocks, delete_blocks, derive_params};
use listedit::edit_metric::{ball_enumerate, check_ball_size_bound, edit_distance, EditBallQuery};
use listedit::inner_code::{capacity_trial_matrix, measure_list_decodability};
use listedit::pseudorandom::{
    exhaustive_outputs, kwise_sample, measure_bias, xor_lemma_check_outputs, BiasedGeneratorSpec, KWiseSamplerSpec,
};
use listedit::sync::{
    sample_sync, verify_sync_with, SampleOutcome, Strategy, SyncParams, SyncViolation, DEFAULT_VERIFY_CAP,
};
use listedit::{bitlinalg::random_matrix, BitMatrix, BitVector, Rational};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c01_edit_distance() -> Check {
    let mut rng = TestRng::new(1);
    for trial in 0..10_000 {
        let (lx, ly) = (rng.below(65) as usize, rng.below(65) as usize);
        let (x, y) = (rng.bits(lx), rng.bits(ly));
        let got = edit_distance(&to_bv(&x), &to_bv(&y));
        let want = oracle_distance(&x, &y);
        ensure(got == want, || format!("trial {trial}: {got} != {want}"))?;
    }
    Ok("10^4 pairs agree".into())
}

fn c02_ball() -> Check {
    let mut balls = 0;
    for len in 0..=8 {
        for c in all_strings(len) {
            for radius in 0..=3 {
                let q = EditBallQuery::new(to_bv(&c), radius);
                let got = ball_enumerate(&q, 1 << 20).map_err(|e| e.to_string())?;
                let mut want = BTreeSet::new();
                for n in len.saturating_sub(radius)..=len + radius {
                    for s in all_strings(n) {
                        if oracle_distance(&c, &s) <= radius {
                            want.insert(to_bv(&s));
                        }
                    }
                }
                ensure(got == want, || format!("center {} radius {radius}", to_bv(&c)))?;
                balls += 1;
            }
        }
    }
    Ok(format!("{balls} balls match exhaustive enumeration"))
}

fn c03_ball_size() -> Check {
    let mut worst = f64::NEG_INFINITY;
    for n in [8usize, 10, 12] {
        for (p, q) in [(1u64, 10u64), (1, 5), (3, 10), (1, 2)] {
            let delta = Rational::new(p, q);
            let seed = n as u64 * 100 + p * 10 + q;
            let report = check_ball_size_bound(n, &delta, 100, seed).map_err(|e| e.to_string())?;
            let radius = n * p as usize / q as usize;
            let bound_log2 = 5.0 * entropy(p as f64 / q as f64) * n as f64;
            // recount the reported worst center independently
            let center = bools(report.argmax_center.as_ref().ok_or("no center")?);
            let count = all_strings(n).filter(|s| oracle_distance(&center, s) <= radius).count() as u64;
            ensure(count == report.max_ball_size, || format!("n={n} δ={p}/{q}: recount {count} != {}", report.max_ball_size))?;
            ensure(report.trials == 100 && report.radius == radius, || "report shape".into())?;
            ensure((count as f64).log2() <= bound_log2 && report.pass, || {
                format!("n={n} δ={p}/{q}: |B| = {count} > 2^{bound_log2:.3}")
            })?;
            worst = worst.max((count as f64).log2() - bound_log2);
        }
    }
    Ok(format!("12 settings × 100 centers, max log2|B| − bound = {worst:.3}"))
}

fn naive_bias(outputs: &[BitVector], masks: impl Iterator<Item = u64>) -> Rational {
    let values: Vec<u64> = outputs.iter().map(|v| v.to_u64().unwrap()).collect();
    let n = values.len() as u64;
    let mut worst = 0u64;
    for mask in masks {
        let ones = values.iter().filter(|&&v| (v & mask).count_ones() % 2 == 1).count() as u64;
        worst = worst.max((2 * ones).abs_diff(n));
    }
    // |Pr[parity = 1] − 1/2| = |2·ones − N| / (2N)
    Rational::new(worst, 2 * n)
}

fn c04_small_bias() -> Check {
    let eps = Rational::new(1, 8);
    let mut detail = Vec::new();
    for n in [8usize, 16] {
        let spec = BiasedGeneratorSpec::new(n, eps).map_err(|e| e.to_string())?;
        let outputs = exhaustive_outputs(&spec).map_err(|e| e.to_string())?;
        let bias = measure_bias(&outputs).map_err(|e| e.to_string())?;
        let oracle = if n == 8 {
            naive_bias(&outputs, 1..1u64 << n)
        } else {
            // all weight-1 and weight-2 masks plus a pseudorandom sample of the rest
            let mut rng = TestRng::new(4);
            let mut masks: Vec<u64> = (0..n).map(|i| 1 << i).collect();
            masks.extend((0..n).flat_map(|i| (i + 1..n).map(move |j| (1 << i) | (1 << j))));
            masks.extend((0..2048).map(|_| rng.below((1 << n) - 1) + 1));
            naive_bias(&outputs, masks.into_iter())
        };
        ensure(oracle <= bias, || format!("n={n}: sampled parity bias {oracle} exceeds measured {bias}"))?;
        if n == 8 {
            ensure(oracle == bias, || format!("n=8: naive bias {oracle} != measured {bias}"))?;
        }
        ensure(bias <= eps, || format!("n={n}: bias {bias} > 1/8"))?;
        detail.push(format!("n={n} bias={bias}"));
        if n == 8 {
            let report = xor_lemma_check_outputs(&outputs).map_err(|e| e.to_string())?;
            let mut counts: HashMap<u64, u64> = HashMap::new();
            for v in &outputs {
                *counts.entry(v.to_u64().unwrap()).or_default() += 1;
            }
            let total = outputs.len() as u64;
            let dev: u64 = (0..1u64 << n).map(|v| (counts.get(&v).copied().unwrap_or(0) << n).abs_diff(total)).sum();
            let distance = Rational::new(dev, (2 * total) << n);
            ensure(distance == report.distance, || format!("distance {distance} != {}", report.distance))?;
            // distance ≤ bias·2^{n/2} with n = 8: distance ≤ 16·bias
            ensure(distance <= bias * 16 && report.pass, || format!("xor bound fails: {distance} > 16·{bias}"))?;
            detail.push(format!("SD={distance} ≤ 16·bias"));
        }
    }
    Ok(detail.join(", "))
}

fn c05_kwise() -> Check {
    for (k, tuple) in [(2usize, 2usize), (3, 3)] {
        let spec = KWiseSamplerSpec::new(k, 4, 1).map_err(|e| e.to_string())?;
        let seeds = 1u64 << spec.seed_len();
        let samples: Vec<Vec<u64>> = (0..seeds)
            .map(|s| {
                let seed = BitVector::from_u64(s, spec.seed_len());
                (0..4).map(|i| kwise_sample(&spec, &seed, i).unwrap().to_u64().unwrap()).collect()
            })
            .collect();
        let index_sets: Vec<Vec<usize>> = if tuple == 2 {
            (0..4).flat_map(|i| (i + 1..4).map(move |j| vec![i, j])).collect()
        } else {
            (0..4).map(|skip| (0..4).filter(|&i| i != skip).collect()).collect()
        };
        for set in index_sets {
            let mut counts = vec![0u64; 1 << tuple];
            for s in &samples {
                let pattern = set.iter().enumerate().fold(0usize, |acc, (t, &i)| acc | (s[i] as usize) << t);
                counts[pattern] += 1;
            }
            let expected = seeds >> tuple;
            ensure(counts.iter().all(|&c| c == expected), || format!("k={k} set {set:?}: counts {counts:?}"))?;
        }
    }
    Ok("all pairs (k=2) and triples (k=3) uniform".into())
}

/// Independent check of a witness with the oracle distance and bitwise products.
fn oracle_revalidate(v: &SyncViolation, params: &SyncParams, mats: &[BitMatrix]) -> bool {
    let r = params.radius();
    let close = |i: usize, x: &BitVector, target: &BitVector| {
        x.len() == params.a
            && !x.is_zero()
            && oracle_distance(&oracle_mul(&bools(x), &matrix_rows(&mats[i])), &bools(target)) <= r
    };
    match v {
        SyncViolation::Condition1 { v, members } => {
            let distinct: BTreeSet<usize> = members.iter().map(|m| m.index).collect();
            distinct.len() == members.len()
                && members.len() > params.l
                && members.iter().all(|m| close(m.index, &m.message, v))
        }
        SyncViolation::Condition2 { index, v, messages } => {
            let distinct: BTreeSet<&BitVector> = messages.iter().collect();
            distinct.len() == messages.len() && messages.len() > params.list_bound && messages.iter().all(|x| close(*index, x, v))
        }
        SyncViolation::Condition3 { index, kernel } => {
            !kernel.is_zero() && oracle_mul(&bools(kernel), &matrix_rows(&mats[*index])).iter().all(|b| !b)
        }
    }
}

fn c06_sync_cross_check() -> Check {
    let params = SyncParams::new(4, 3, 6, Rational::new(1, 6), 2, 4).map_err(|e| e.to_string())?;
    let (mut passed, mut witnesses) = (0, 0);
    for instance in 0..50u64 {
        let mats: Vec<BitMatrix> = (0..4).map(|i| random_matrix(3, 6, instance * 16 + i)).collect();
        let fast = verify_sync_with(&params, &mats, Strategy::Fast, DEFAULT_VERIFY_CAP).map_err(|e| e.to_string())?;
        let reference =
            verify_sync_with(&params, &mats, Strategy::Reference, DEFAULT_VERIFY_CAP).map_err(|e| e.to_string())?;
        ensure(fast.passed() == reference.passed() && fast.kinds() == reference.kinds(), || {
            format!("instance {instance}: fast {:?} vs reference {:?}", fast.kinds(), reference.kinds())
        })?;
        ensure(fast.first().map(|v| v.kind()) == reference.first().map(|v| v.kind()), || {
            format!("instance {instance}: first violation differs")
        })?;
        for v in [&fast, &reference].iter().flat_map(|r| [&r.condition1, &r.condition2, &r.condition3]).flatten() {
            ensure(oracle_revalidate(v, &params, &mats) && v.revalidate(&params, &mats), || {
                format!("instance {instance}: witness {v:?} does not re-validate")
            })?;
            witnesses += 1;
        }
        passed += fast.passed() as usize;
    }
    Ok(format!("50 instances agree ({passed} sync), {witnesses} witnesses re-validated"))
}

fn c07_fixtures() -> Check {
    let params = SyncParams::new(2, 2, 4, Rational::from_integer(0), 1, 1).map_err(|e| e.to_string())?;
    let disjoint = vec![
        BitMatrix::parse_rows(&["1000", "0100"]).map_err(|e| e.to_string())?,
        BitMatrix::parse_rows(&["0010", "0001"]).map_err(|e| e.to_string())?,
    ];
    let verdict = verify_sync_with(&params, &disjoint, Strategy::Fast, DEFAULT_VERIFY_CAP).map_err(|e| e.to_string())?;
    ensure(verdict.passed(), || format!("disjoint pair refuted: {:?}", verdict.kinds()))?;
    let duplicated = vec![disjoint[0].clone(), disjoint[0].clone()];
    let verdict =
        verify_sync_with(&params, &duplicated, Strategy::Fast, DEFAULT_VERIFY_CAP).map_err(|e| e.to_string())?;
    match verdict.first() {
        Some(w @ SyncViolation::Condition1 { .. }) => {
            ensure(oracle_revalidate(w, &params, &duplicated), || "condition-1 witness invalid".into())?
        }
        other => return Err(format!("expected condition-1 witness, got {other:?}")),
    }
    Ok("disjoint pair verifies, duplicated pair refuted by condition 1".into())
}

/// Retry budget: measured success rate 86/1000 per attempt; the 99% Wilson lower
/// bound 0.0658 needs 203 attempts for failure below 1e-6, pinned to 256.
const DESK_RETRY_BUDGET: usize = 256;

fn c08_sync_search() -> Check {
    let desk = desk();
    let outcome = sample_sync(&desk.sync_params, 2024, DESK_RETRY_BUDGET, DEFAULT_VERIFY_CAP).map_err(|e| e.to_string())?;
    let SampleOutcome::Found { sequence, attempts, .. } = outcome else {
        return Err(format!("no sequence within {DESK_RETRY_BUDGET} attempts"));
    };
    ensure(sequence.params.radius() == 2 && sequence.is_verified(), || "wrong radius or unverified".into())?;
    ensure(sequence.to_json().trim() == read_fixture("sync.json").trim(), || "fixture does not regenerate".into())?;
    // failure probability of the pinned budget at the measured rate
    let failure = (1.0f64 - 0.086).powi(DESK_RETRY_BUDGET as i32);
    ensure(failure < 1e-6, || format!("budget failure probability {failure:e}"))?;
    Ok(format!("found at attempt {attempts}, fixture regenerates bit-exactly, budget failure ≈ {failure:.1e}"))
}

fn c09_capture() -> Check {
    let desk = desk();
    let mut rng = TestRng::new(9);
    for r in 0..=2usize {
        for trial in 0..100u64 {
            let m = to_bv(&rng.bits(desk.code.message_bits()));
            let cw = desk.code.encode(&m).map_err(|e| e.to_string())?.bits();
            let j = rng.below(8) as usize;
            let y = corrupt_blocks(&cw, 16, &[(j, r)], rng.next()).map_err(|e| e.to_string())?;
            let boxes = desk.code.stage_one(&y, 2 * r).boxes;
            let inner = desk.code.inner_messages(&m).map_err(|e| e.to_string())?;
            ensure(boxes[j].contains(&inner[j]), || format!("r={r} trial {trial}: block {j} lost its message"))?;
        }
    }
    Ok("300/300 trials capture the corrupted block's message".into())
}

fn c10_end_to_end() -> Check {
    let desk = desk();
    let p = desk.params;
    let mut rng = TestRng::new(10);
    let mut max_list = 0;
    for trial in 0..100u64 {
        let m = to_bv(&rng.bits(desk.code.message_bits()));
        let cw = desk.code.encode(&m).map_err(|e| e.to_string())?.bits();
        let count = rng.below(3) as usize;
        let mut blocks: Vec<usize> = Vec::new();
        while blocks.len() < count {
            let j = rng.below(8) as usize;
            if !blocks.contains(&j) {
                blocks.push(j);
            }
        }
        let edits: Vec<(usize, usize)> = blocks.iter().map(|&j| (j, 1)).collect();
        let y = corrupt_blocks(&cw, 16, &edits, rng.next()).map_err(|e| e.to_string())?;
        let out = desk.code.decode(&y).map_err(|e| e.to_string())?;
        let rep = &out.report;
        ensure(out.messages.contains(&m), || format!("trial {trial}: message missing ({} outputs)", out.messages.len()))?;
        for w in &rep.windows {
            ensure(w.hits.len() <= p.l && w.hits.iter().all(|h| h.count <= p.list_bound), || {
                format!("trial {trial}: window at {} has {} blocks", w.start, w.hits.len())
            })?;
        }
        ensure(rep.total_insertions <= p.l * p.list_bound * rep.window_count, || format!("trial {trial}: box budget"))?;
        max_list = max_list.max(out.messages.len());
    }
    Ok(format!("100/100 decoded, per-window bounds hold, max list {max_list}"))
}

fn c11_block_deletion() -> Check {
    let desk = desk();
    let mut rng = TestRng::new(11);
    for trial in 0..100u64 {
        let m = to_bv(&rng.bits(desk.code.message_bits()));
        let cw = desk.code.encode(&m).map_err(|e| e.to_string())?.bits();
        let j = rng.below(8) as usize;
        let y = delete_blocks(&cw, 16, &[j]).map_err(|e| e.to_string())?;
        let out = desk.code.decode(&y).map_err(|e| e.to_string())?;
        ensure(out.messages.contains(&m), || format!("trial {trial}: deleting block {j} lost the message"))?;
    }
    Ok("100/100 recovered after deleting one block".into())
}

fn c12_params() -> Check {
    let infeasible = derive_params(Rational::new(1, 16), 1 << 20, 1.0).map_err(|e| e.to_string())?;
    ensure(!infeasible.feasible && infeasible.inner_rate < 0.0, || "γ=1/16 should be infeasible".into())?;
    let d = derive_params(Rational::new(1, 256), 1 << 20, 1.0).map_err(|e| e.to_string())?;
    ensure(d.delta == Rational::new(1, 64) && d.l == 255 && d.b == 20480, || {
        format!("δ={} l={} b={}", d.delta, d.l, d.b)
    })?;
    let oracle = 1.0 - 2.0 / 256.0 - 5.0 * entropy(1.0 / 64.0);
    ensure((d.inner_rate - oracle).abs() < 1e-3, || format!("R={} vs {oracle}", d.inner_rate))?;
    Ok(format!("γ=1/16 infeasible (R={:.4}); γ=1/256: R={:.5} (oracle {oracle:.5})", infeasible.inner_rate, d.inner_rate))
}

fn c13_capacity() -> Check {
    let (k, n, radius) = (4usize, 12usize, 1usize);
    for trial in 0..20 {
        let g = capacity_trial_matrix(k, n, 13, trial);
        let got = measure_list_decodability(&g, radius).map_err(|e| e.to_string())?.max_list_size;
        let rows = matrix_rows(&g);
        let codewords: Vec<Vec<bool>> = all_strings(k).map(|x| oracle_mul(&x, &rows)).collect();
        let mut want = 0;
        for len in n - radius..=n + radius {
            for y in all_strings(len) {
                let hits = codewords.iter().filter(|c| oracle_distance(c, &y) <= radius).count();
                want = want.max(hits);
            }
        }
        ensure(got == want, || format!("trial {trial}: {got} != naive {want}"))?;
    }
    Ok("20/20 trials agree with the naive double loop".into())
}

type Criterion = (u32, &'static str, u64, fn() -> Check);

#[test]
fn acceptance() {
    let criteria: [Criterion; 13] = [
        (1, "edit distance matches the insertion/deletion DP", 10, c01_edit_distance),
        (2, "ball enumeration matches exhaustive filtering", 60, c02_ball),
        (3, "ball-size lemma holds", 300, c03_ball_size),
        (4, "small-bias generator and XOR bound", 120, c04_small_bias),
        (5, "k-wise independence", 60, c05_kwise),
        (6, "fast and reference sync verifiers agree", 300, c06_sync_cross_check),
        (7, "deterministic sync fixtures", 1, c07_fixtures),
        (8, "desk sync sequence found and fixture regenerates", 600, c08_sync_search),
        (9, "capture property", 120, c09_capture),
        (10, "end-to-end decoding", 300, c10_end_to_end),
        (11, "block-deletion channel", 120, c11_block_deletion),
        (12, "parameter calculator", 1, c12_params),
        (13, "capacity experiment matches naive oracle", 300, c13_capacity),
    ];
    let mut failed = Vec::new();
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(d) if elapsed > Duration::from_secs(limit) => Err(format!("{d}; over the {limit}s limit")),
            r => r,
        };
        // Straight to the stdout handle so the lines show without --nocapture.
        let line = match &result {
            Ok(detail) => format!("criterion {id:2} PASS [{:.2}s] {name}: {detail}", elapsed.as_secs_f64()),
            Err(why) => {
                failed.push(id);
                format!("criterion {id:2} FAIL [{:.2}s] {name}: {why}", elapsed.as_secs_f64())
            }
        };
        writeln!(std::io::stdout(), "{line}").unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
