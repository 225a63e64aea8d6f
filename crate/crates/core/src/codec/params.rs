use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::edit_metric::binary_entropy_rational;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::sync::SyncParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamMode {
    #[serde(rename = "paper_derived")]
    Derived,
    Override,
}

/// Operational parameters of the concatenated code and its decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcatParams {
    pub mode: ParamMode,
    #[serde(default, with = "rational::serde_opt_str", skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Rational>,
    /// Number of blocks.
    pub n: usize,
    pub a: usize,
    pub b: usize,
    /// Sync radius is `⌊δb⌋`.
    #[serde(with = "rational::serde_str")]
    pub delta: Rational,
    pub l: usize,
    #[serde(rename = "L")]
    pub list_bound: usize,
    /// Boxes holding more than this many vectors (zero included) are emptied.
    pub box_limit: usize,
    pub window_step: usize,
    /// Inner list-decoding radius used on every window.
    pub threshold: usize,
    pub edit_budget: usize,
    /// Permit outer positions narrower than `a`; the spare inner bits are zero.
    #[serde(default)]
    pub allow_padding: bool,
}

impl ConcatParams {
    /// The shipped small-scale profile: 8 blocks of 16 bits carrying 4 bits each,
    /// sync radius 2 with `l = 3`, `L = 8`, and a decoder at step 1, threshold 2.
    pub fn desk_profile() -> Self {
        ConcatParams {
            mode: ParamMode::Override,
            gamma: None,
            n: 8,
            a: 4,
            b: 16,
            delta: Rational::new(1, 8),
            l: 3,
            list_bound: 8,
            box_limit: 8,
            window_step: 1,
            threshold: 2,
            edit_budget: 2,
            allow_padding: false,
        }
    }

    pub fn sync_params(&self) -> SyncParams {
        SyncParams { n: self.n, a: self.a, b: self.b, delta: self.delta, l: self.l, list_bound: self.list_bound }
    }

    pub fn sync_radius(&self) -> usize {
        rational::floor_mul(&self.delta, self.b as u64) as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.a == 0 || self.a > self.b {
            return Err(Error::param(format!(
                "need n >= 1 and 1 <= a <= b, got n = {}, a = {}, b = {}",
                self.n, self.a, self.b
            )));
        }
        if self.threshold > self.b {
            return Err(Error::param(format!("threshold {} exceeds b = {}", self.threshold, self.b)));
        }
        if self.window_step == 0 {
            return Err(Error::param("window step must be at least 1"));
        }
        if self.threshold > self.sync_radius() {
            return Err(Error::param(format!(
                "threshold {} exceeds the sync radius {}",
                self.threshold,
                self.sync_radius()
            )));
        }
        if self.mode == ParamMode::Derived {
            let gamma = self.gamma.ok_or_else(|| Error::param("derived mode needs gamma"))?;
            let expected = derive_params(gamma, self.n as u64, 1.0)?.to_concat()?;
            let same = ConcatParams { allow_padding: self.allow_padding, ..expected } == *self;
            if !same {
                return Err(Error::param("derived-mode parameters disagree with their formulas"));
            }
        }
        Ok(())
    }
}

/// Every quantity the construction derives from `γ` and `n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DerivedParams {
    #[serde(with = "rational::serde_str")]
    pub gamma: Rational,
    pub n: u64,
    pub c1: f64,
    /// `4γ`.
    #[serde(with = "rational::serde_str")]
    pub delta: Rational,
    /// `⌈1/γ⌉ − 1`.
    pub l: u64,
    /// `L = 2^{l+1}`, as a decimal string.
    #[serde(rename = "L", with = "big_str")]
    pub list_bound: BigUint,
    /// `R = 1 − 2/(l+1) − 5H(δ)`.
    pub inner_rate: f64,
    /// `⌈4(l+1)·log₂ n⌉`.
    pub b: u64,
    /// `⌊R·b⌋`, zero when `R ≤ 0`.
    pub a: u64,
    /// `l0 = ⌈L/γ³⌉`.
    #[serde(with = "big_str")]
    pub box_limit: BigUint,
    /// `max(1, ⌊γb⌋)`.
    pub window_step: u64,
    /// `⌊4γb⌋`.
    pub threshold: u64,
    /// `⌊γ²bn⌋`.
    pub edit_budget: u128,
    /// `(1 − c1·√(2γ))·(1 − 2γ − 5H(4γ))`.
    pub rate_lower_bound: f64,
    pub feasible: bool,
    pub notes: Vec<String>,
}

mod big_str {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// `(1 − c1·√(2γ))·(1 − 2γ − 5H(4γ))`.
pub fn rate_lower_bound_formula(gamma: &Rational, c1: f64) -> Result<f64> {
    let g = rational::to_f64(gamma);
    let inner = 1.0 - 2.0 * g - 5.0 * binary_entropy_rational(&(*gamma * 4))?;
    Ok((1.0 - c1 * (2.0 * g).sqrt()) * inner)
}

pub fn derive_params(gamma: Rational, n: u64, c1: f64) -> Result<DerivedParams> {
    if *gamma.numer() == 0 || gamma >= Rational::new(1, 8) {
        return Err(Error::param(format!("gamma = {} must satisfy 0 < gamma < 1/8", rational::format(&gamma))));
    }
    if n < 2 {
        return Err(Error::param("block count n must be at least 2"));
    }
    let (num, den) = (*gamma.numer(), *gamma.denom());
    let delta = gamma * 4;
    let l = den.div_ceil(num) - 1;
    let list_bound = BigUint::from(1u8) << (l + 1);
    let inner_rate = 1.0 - 2.0 / (l + 1) as f64 - 5.0 * binary_entropy_rational(&delta)?;
    let b = (4.0 * (l + 1) as f64 * (n as f64).log2()).ceil() as u64;
    let a = if inner_rate > 0.0 { (inner_rate * b as f64).floor() as u64 } else { 0 };
    let gamma_cubed_den = BigUint::from(den).pow(3);
    let gamma_cubed_num = BigUint::from(num).pow(3);
    let scaled = &list_bound * gamma_cubed_den;
    let mut box_limit = &scaled / &gamma_cubed_num;
    if !(&scaled % &gamma_cubed_num).is_zero() {
        box_limit += 1u8;
    }
    let window_step = rational::floor_mul(&gamma, b).max(1);
    let threshold = rational::floor_mul(&delta, b);
    let edit_budget = (num as u128 * num as u128 * b as u128 * n as u128) / (den as u128 * den as u128);
    let rate_lower_bound = rate_lower_bound_formula(&gamma, c1)?;
    let feasible = inner_rate > 0.0 && a >= 1;
    let mut notes = Vec::new();
    if !feasible {
        notes.push(format!("inner rate R = {inner_rate:.6} leaves no room for message bits"));
    }
    notes.push(format!("rate lower bound assumes c1 = {c1}"));
    Ok(DerivedParams {
        gamma,
        n,
        c1,
        delta,
        l,
        list_bound,
        inner_rate,
        b,
        a,
        box_limit,
        window_step,
        threshold,
        edit_budget,
        rate_lower_bound,
        feasible,
        notes,
    })
}

impl DerivedParams {
    /// Operational parameters, when every derived quantity fits machine integers.
    pub fn to_concat(&self) -> Result<ConcatParams> {
        let small = |v: &BigUint, what: &str| -> Result<usize> {
            usize::try_from(v).map_err(|_| Error::param(format!("{what} = {v} does not fit in a machine word")))
        };
        if !self.feasible {
            return Err(Error::param("parameters are infeasible (R <= 0)"));
        }
        Ok(ConcatParams {
            mode: ParamMode::Derived,
            gamma: Some(self.gamma),
            n: self.n as usize,
            a: self.a as usize,
            b: self.b as usize,
            delta: self.delta,
            l: self.l as usize,
            list_bound: small(&self.list_bound, "L")?,
            box_limit: small(&self.box_limit, "l0")?,
            window_step: self.window_step as usize,
            threshold: self.threshold as usize,
            edit_budget: usize::try_from(self.edit_budget).map_err(|_| Error::param("edit budget too large"))?,
            allow_padding: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_range() {
        assert!(derive_params(Rational::new(1, 8), 1 << 20, 1.0).is_err());
        assert!(derive_params(Rational::from_integer(0), 1 << 20, 1.0).is_err());
        assert!(derive_params(Rational::new(1, 9), 1, 1.0).is_err());
    }

    #[test]
    fn small_integer_quantities() {
        let d = derive_params(Rational::new(1, 16), 1 << 10, 1.0).unwrap();
        assert_eq!(d.l, 15);
        assert_eq!(d.delta, Rational::new(1, 4));
        assert_eq!(d.list_bound, BigUint::from(1u32 << 16));
        assert_eq!(d.b, 4 * 16 * 10);
        assert_eq!(d.threshold, 160);
        assert_eq!(d.window_step, 40);
        // l0 = 2^16 · 16^3
        assert_eq!(d.box_limit, BigUint::from(1u64 << 28));
        // ⌊b n / 256⌋
        assert_eq!(d.edit_budget, 640 * 1024 / 256);
        assert!(!d.feasible);
        assert!(d.to_concat().is_err());
    }

    #[test]
    fn desk_profile_is_consistent() {
        let p = ConcatParams::desk_profile();
        p.validate().unwrap();
        assert_eq!(p.sync_radius(), 2);
        let mut bad = p;
        bad.threshold = 3;
        assert!(bad.validate().is_err());
        bad = p;
        bad.window_step = 0;
        assert!(bad.validate().is_err());
    }
}
