//! Small-bias generators and k-wise independent samplers over GF(2^m).
//!
//! The small-bias generator is the powering construction: a seed `(x, y)` of two
//! field elements expands to the bits `⟨x^i · y⟩₀` for `i = 0, 1, …, n−1`, where
//! `⟨·⟩₀` is the constant coefficient in the polynomial basis. For a nonzero test
//! vector `c`, the parity `Σ c_i⟨x^i y⟩₀ = ⟨p_c(x) · y⟩₀` is unbiased unless `x` is a
//! root of `p_c`, which has degree below `n`; hence the bias is at most `n / 2^m`.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::bitlinalg::BitVector;
use crate::error::{Error, Result};
use crate::gf::Gf2m;
use crate::rational::{self, Rational};

/// Largest output length accepted by the exhaustive bias measurements.
pub const MAX_MEASURED_OUTPUT_LEN: usize = 20;
/// Largest seed length accepted by the exhaustive bias measurements.
pub const MAX_MEASURED_SEED_LEN: usize = 24;
pub const MAX_XOR_LEMMA_OUTPUT_LEN: usize = 12;
pub const MAX_XOR_LEMMA_SEED_LEN: usize = 20;

/// Requested bias, either as an exact rational or as `2^{-k}` for large `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BiasTarget {
    Exact(#[serde(with = "rational::serde_str")] Rational),
    InversePowerOfTwo(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiasedGeneratorSpec {
    pub output_len: usize,
    pub target: BiasTarget,
    /// `m = ⌈log₂(n/ε)⌉`; the seed is `2m` bits.
    pub field_log: u32,
}

fn ceil_log2(v: u128) -> u32 {
    if v <= 1 {
        0
    } else {
        128 - (v - 1).leading_zeros()
    }
}

impl BiasedGeneratorSpec {
    pub fn new(output_len: usize, epsilon: Rational) -> Result<Self> {
        if output_len == 0 {
            return Err(Error::param("generator output length must be positive"));
        }
        if *epsilon.numer() == 0 || epsilon > Rational::from_integer(1) {
            return Err(Error::param(format!(
                "bias target {} must lie in (0, 1]",
                rational::format(&epsilon)
            )));
        }
        // smallest m with 2^m · num >= n · den
        let need = output_len as u128 * *epsilon.denom() as u128;
        let num = *epsilon.numer() as u128;
        let field_log = ceil_log2(need.div_ceil(num)).max(1);
        Ok(BiasedGeneratorSpec { output_len, target: BiasTarget::Exact(epsilon), field_log })
    }

    /// Target bias `2^{-k}`; `m = ⌈log₂ n⌉ + k` without forming `ε` numerically.
    pub fn with_inverse_power_of_two(output_len: usize, k: u64) -> Result<Self> {
        if output_len == 0 {
            return Err(Error::param("generator output length must be positive"));
        }
        let field_log = u64::from(ceil_log2(output_len as u128)) + k;
        let field_log = u32::try_from(field_log.max(1))
            .map_err(|_| Error::param(format!("field degree {field_log} does not fit")))?;
        Ok(BiasedGeneratorSpec { output_len, target: BiasTarget::InversePowerOfTwo(k), field_log })
    }

    pub fn seed_len(&self) -> u64 {
        2 * u64::from(self.field_log)
    }

    /// The construction's guarantee `n / 2^m` (only meaningful for small `m`).
    pub fn bias_guarantee(&self) -> Option<Rational> {
        let den = 1u64.checked_shl(self.field_log)?;
        Some(Rational::new(self.output_len as u64, den))
    }

    fn field(&self) -> Result<Gf2m> {
        Gf2m::new(self.field_log)
    }
}

/// Low `bits.len()` bits packed LSB-first into an integer (at most 64 bits).
fn chunk_value(bits: &BitVector, start: usize, width: usize) -> Result<u64> {
    bits.slice(start, start + width)?
        .to_u64()
        .ok_or_else(|| Error::param("field element wider than 64 bits"))
}

pub fn eps_biased_expand(spec: &BiasedGeneratorSpec, seed: &BitVector) -> Result<BitVector> {
    Error::check_dim(spec.seed_len() as usize, seed.len())?;
    let field = spec.field()?;
    let m = spec.field_log as usize;
    let x = chunk_value(seed, 0, m)?;
    let y = chunk_value(seed, m, m)?;
    let mut out = BitVector::zeros(spec.output_len);
    let mut power_times_y = y;
    for i in 0..spec.output_len {
        out.set(i, power_times_y & 1 == 1)?;
        power_times_y = field.mul(power_times_y, x);
    }
    Ok(out)
}

/// Outputs of the generator for every seed, seed value `v` mapping to the seed
/// whose bit `i` is bit `i` of `v`.
pub fn exhaustive_outputs(spec: &BiasedGeneratorSpec) -> Result<Vec<BitVector>> {
    let s = spec.seed_len() as usize;
    if s > MAX_MEASURED_SEED_LEN {
        return Err(Error::CapExceeded {
            what: "exhaustive seed sweep",
            required: 1u128 << s.min(127),
            cap: 1u128 << MAX_MEASURED_SEED_LEN,
        });
    }
    (0..1u64 << s)
        .map(|v| eps_biased_expand(spec, &BitVector::from_u64(v, s)))
        .collect()
}

/// Walsh–Hadamard spectrum of the output histogram: entry `c` is
/// `Σ_outputs (−1)^{⟨v, c⟩}`.
fn walsh_spectrum(outputs: &[BitVector], n: usize) -> Result<Vec<i64>> {
    let mut table = vec![0i64; 1 << n];
    for v in outputs {
        Error::check_dim(n, v.len())?;
        table[v.to_u64().expect("n <= 20") as usize] += 1;
    }
    let mut h = 1;
    while h < table.len() {
        for block in table.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
    Ok(table)
}

fn check_regime(outputs: &[BitVector], max_n: usize, max_seed: usize) -> Result<usize> {
    let n = outputs.first().map_or(0, BitVector::len);
    if n > max_n {
        return Err(Error::param(format!("output length {n} exceeds exhaustive limit {max_n}")));
    }
    if outputs.is_empty() || outputs.len() > 1 << max_seed {
        return Err(Error::param(format!(
            "distribution of {} samples outside exhaustive limit 1..=2^{max_seed}",
            outputs.len()
        )));
    }
    Ok(n)
}

/// `max_{c ≠ 0} |Pr[⟨g(Z), c⟩ = 1] − 1/2|` for the uniform distribution over
/// `outputs` (one entry per seed).
pub fn measure_bias(outputs: &[BitVector]) -> Result<Rational> {
    let n = check_regime(outputs, MAX_MEASURED_OUTPUT_LEN, MAX_MEASURED_SEED_LEN)?;
    let spectrum = walsh_spectrum(outputs, n)?;
    let worst = spectrum.iter().skip(1).map(|w| w.unsigned_abs()).max().unwrap_or(0);
    Ok(Rational::new(worst, 2 * outputs.len() as u64))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct XorLemmaReport {
    pub output_len: usize,
    #[serde(with = "rational::serde_str")]
    pub distance: Rational,
    #[serde(with = "rational::serde_str")]
    pub bias: Rational,
    /// `bias · 2^{n/2}` as a float, for display; the pass flag is decided exactly.
    pub bound: f64,
    pub pass: bool,
}

/// Exact statistical distance from uniform against the `ε̂ · 2^{n/2}` bound.
pub fn xor_lemma_check_outputs(outputs: &[BitVector]) -> Result<XorLemmaReport> {
    let n = check_regime(outputs, MAX_XOR_LEMMA_OUTPUT_LEN, MAX_XOR_LEMMA_SEED_LEN)?;
    let bias = measure_bias(outputs)?;
    let total = outputs.len() as u64;
    let mut counts = vec![0u64; 1 << n];
    for v in outputs {
        counts[v.to_u64().expect("n <= 12") as usize] += 1;
    }
    // Σ_v |count_v / N − 2^{-n}| / 2  =  Σ_v |count_v·2^n − N| / (2·N·2^n)
    let deviation: u64 = counts.iter().map(|&c| (c << n).abs_diff(total)).sum();
    let distance = Rational::new(deviation, (2 * total) << n);
    // distance ≤ bias·2^{n/2}  ⟺  distance² ≤ bias²·2^n
    let big = |v: u64| BigUint::from(v);
    let lhs = big(*distance.numer()).pow(2) * big(*bias.denom()).pow(2);
    let rhs = (big(*bias.numer()).pow(2) * big(*distance.denom()).pow(2)) << n;
    Ok(XorLemmaReport {
        output_len: n,
        distance,
        bias,
        bound: rational::to_f64(&bias) * (n as f64 / 2.0).exp2(),
        pass: lhs <= rhs,
    })
}

pub fn xor_lemma_check(spec: &BiasedGeneratorSpec) -> Result<XorLemmaReport> {
    if spec.output_len > MAX_XOR_LEMMA_OUTPUT_LEN || spec.seed_len() as usize > MAX_XOR_LEMMA_SEED_LEN {
        return Err(Error::param(format!(
            "xor lemma check limited to n <= {MAX_XOR_LEMMA_OUTPUT_LEN}, s <= {MAX_XOR_LEMMA_SEED_LEN}"
        )));
    }
    xor_lemma_check_outputs(&exhaustive_outputs(spec)?)
}

/// `k` values of `φ` bits each, any `k` of the `n` outputs jointly uniform.
///
/// The seed holds `k` coefficients of `field_log` bits each (coefficient `j` in seed
/// bits `[j·F, (j+1)·F)`, LSB first). Output `i` is `p(α_i)` truncated to its low `φ`
/// bits, where `α_i` is the field element with integer representation `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KWiseSamplerSpec {
    pub k: usize,
    pub domain_size: usize,
    pub value_len: usize,
    pub field_log: u32,
}

impl KWiseSamplerSpec {
    pub fn new(k: usize, domain_size: usize, value_len: usize) -> Result<Self> {
        let field_log = (ceil_log2(domain_size as u128) as usize).max(value_len).max(1);
        Self::with_field_log(k, domain_size, value_len, field_log as u32)
    }

    pub fn with_field_log(k: usize, domain_size: usize, value_len: usize, field_log: u32) -> Result<Self> {
        if (field_log as usize) < value_len || (domain_size as u128) > 1u128 << field_log {
            return Err(Error::param(format!(
                "field GF(2^{field_log}) cannot index {domain_size} points of {value_len} bits"
            )));
        }
        Gf2m::new(field_log)?;
        Ok(KWiseSamplerSpec { k, domain_size, value_len, field_log })
    }

    pub fn seed_len(&self) -> usize {
        self.k * self.field_log as usize
    }

    /// Number of master seeds; zero when `k = 0` (no coefficients, nothing to try).
    pub fn seed_space_log2(&self) -> Option<usize> {
        (self.k > 0).then(|| self.seed_len())
    }
}

pub fn kwise_sample(spec: &KWiseSamplerSpec, seed: &BitVector, index: usize) -> Result<BitVector> {
    Error::check_dim(spec.seed_len(), seed.len())?;
    if index >= spec.domain_size {
        return Err(Error::OutOfRange { index, len: spec.domain_size });
    }
    let field = Gf2m::new(spec.field_log)?;
    let f = spec.field_log as usize;
    let coeffs = (0..spec.k)
        .map(|j| chunk_value(seed, j * f, f))
        .collect::<Result<Vec<_>>>()?;
    let value = field.eval_poly(&coeffs, index as u64);
    Ok(BitVector::from_u64(value, spec.value_len))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_length_formula() {
        let spec = BiasedGeneratorSpec::new(8, Rational::new(1, 8)).unwrap();
        assert_eq!(spec.field_log, 6);
        assert_eq!(spec.seed_len(), 12);
        let spec = BiasedGeneratorSpec::new(16, Rational::new(1, 8)).unwrap();
        assert_eq!(spec.field_log, 7);
        let spec = BiasedGeneratorSpec::new(10, Rational::new(1, 3)).unwrap();
        assert_eq!(spec.field_log, 5); // 2^5 = 32 >= 30
        let huge = BiasedGeneratorSpec::with_inverse_power_of_two(24, 2 * 6 * 3).unwrap();
        assert_eq!(huge.field_log, 5 + 36);
        assert!(BiasedGeneratorSpec::new(8, Rational::from_integer(0)).is_err());
        assert!(BiasedGeneratorSpec::new(8, Rational::new(3, 2)).is_err());
    }

    #[test]
    fn zero_x_annihilates_later_bits() {
        let spec = BiasedGeneratorSpec::new(8, Rational::new(1, 8)).unwrap();
        // x = 0, y = 1: output bit 0 is ⟨y⟩₀ = 1, all later bits vanish.
        let seed = BitVector::from_u64(1 << 6, 12);
        let out = eps_biased_expand(&spec, &seed).unwrap();
        assert_eq!(out.to_string(), "10000000");
        assert_eq!(out, eps_biased_expand(&spec, &seed).unwrap());
        assert!(eps_biased_expand(&spec, &BitVector::zeros(11)).is_err());
    }

    #[test]
    fn oversized_fields_are_rejected() {
        let huge = BiasedGeneratorSpec::with_inverse_power_of_two(24, 36).unwrap();
        assert!(eps_biased_expand(&huge, &BitVector::zeros(huge.seed_len() as usize)).is_err());
        assert!(exhaustive_outputs(&huge).is_err());
    }

    #[test]
    fn bias_of_reference_distributions() {
        let uniform: Vec<BitVector> = (0..16).map(|v| BitVector::from_u64(v, 4)).collect();
        assert_eq!(measure_bias(&uniform).unwrap(), Rational::from_integer(0));
        let constant = vec![BitVector::from_u64(5, 4); 16];
        assert_eq!(measure_bias(&constant).unwrap(), Rational::new(1, 2));
        assert!(measure_bias(&[BitVector::zeros(21)]).is_err());
        assert!(measure_bias(&[]).is_err());
    }

    #[test]
    fn xor_lemma_reference_distributions() {
        let uniform: Vec<BitVector> = (0..256).map(|v| BitVector::from_u64(v, 8)).collect();
        let r = xor_lemma_check_outputs(&uniform).unwrap();
        assert_eq!(r.distance, Rational::from_integer(0));
        assert!(r.pass);
        // point mass: distance 1 − 2^{-n}
        let constant = vec![BitVector::from_u64(3, 8); 64];
        let r = xor_lemma_check_outputs(&constant).unwrap();
        assert_eq!(r.distance, Rational::new(255, 256));
        assert_eq!(r.bias, Rational::new(1, 2));
        assert!(r.pass);
    }

    #[test]
    fn kwise_trivial_cases() {
        let spec = KWiseSamplerSpec::new(1, 8, 3).unwrap();
        let seed = BitVector::from_u64(0b101, spec.seed_len());
        for i in 0..8 {
            assert_eq!(kwise_sample(&spec, &seed, i).unwrap(), BitVector::from_u64(0b101, 3));
        }
        let spec = KWiseSamplerSpec::new(3, 4, 2).unwrap();
        let zero = BitVector::zeros(spec.seed_len());
        for i in 0..4 {
            assert!(kwise_sample(&spec, &zero, i).unwrap().is_zero());
        }
        assert!(kwise_sample(&spec, &zero, 4).is_err());
        assert!(KWiseSamplerSpec::with_field_log(2, 8, 1, 2).is_err());
        assert_eq!(KWiseSamplerSpec::new(0, 4, 1).unwrap().seed_space_log2(), None);
    }
}
