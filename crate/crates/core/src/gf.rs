//! Binary extension fields GF(2^m) for 1 ≤ m ≤ 32.
//!
//! Elements are `u64` values in the polynomial basis: bit `i` is the coefficient of
//! `x^i`. Each degree uses one fixed primitive polynomial from the table below, so
//! every generator built on top of these fields is bit-exact across implementations.

use crate::error::{Error, Result};

pub const MAX_DEGREE: u32 = 32;

/// Reduction polynomials indexed by degree, including the leading term.
///
/// | m | polynomial |
/// |---|------------|
/// | 1 | x + 1 |
/// | 2 | x^2 + x + 1 |
/// | 3 | x^3 + x + 1 |
/// | 4 | x^4 + x + 1 |
/// | 5 | x^5 + x^2 + 1 |
/// | 6 | x^6 + x + 1 |
/// | 7 | x^7 + x + 1 |
/// | 8 | x^8 + x^4 + x^3 + x^2 + 1 |
/// | 9 | x^9 + x^4 + 1 |
/// | 10 | x^10 + x^3 + 1 |
/// | 11 | x^11 + x^2 + 1 |
/// | 12 | x^12 + x^6 + x^4 + x + 1 |
/// | 13 | x^13 + x^4 + x^3 + x + 1 |
/// | 14 | x^14 + x^10 + x^6 + x + 1 |
/// | 15 | x^15 + x + 1 |
/// | 16 | x^16 + x^12 + x^3 + x + 1 |
/// | 17 | x^17 + x^3 + 1 |
/// | 18 | x^18 + x^7 + 1 |
/// | 19 | x^19 + x^5 + x^2 + x + 1 |
/// | 20 | x^20 + x^3 + 1 |
/// | 21 | x^21 + x^2 + 1 |
/// | 22 | x^22 + x + 1 |
/// | 23 | x^23 + x^5 + 1 |
/// | 24 | x^24 + x^7 + x^2 + x + 1 |
/// | 25 | x^25 + x^3 + 1 |
/// | 26 | x^26 + x^6 + x^2 + x + 1 |
/// | 27 | x^27 + x^5 + x^2 + x + 1 |
/// | 28 | x^28 + x^3 + 1 |
/// | 29 | x^29 + x^2 + 1 |
/// | 30 | x^30 + x^6 + x^4 + x + 1 |
/// | 31 | x^31 + x^3 + 1 |
/// | 32 | x^32 + x^22 + x^2 + x + 1 |
pub const POLYNOMIALS: [u64; 33] = [
    0,
    0b11,
    0b111,
    0b1011,
    0x13,
    0x25,
    0x43,
    0x83,
    0x11d,
    0x211,
    0x409,
    0x805,
    0x1053,
    0x201b,
    0x4443,
    0x8003,
    0x1100b,
    0x20009,
    0x40081,
    0x80027,
    0x100009,
    0x200005,
    0x400003,
    0x800021,
    0x1000087,
    0x2000009,
    0x4000047,
    0x8000027,
    0x10000009,
    0x20000005,
    0x40000053,
    0x80000009,
    0x100400007,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gf2m {
    degree: u32,
    poly: u64,
}

impl Gf2m {
    pub fn new(degree: u32) -> Result<Self> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(Error::param(format!(
                "field degree {degree} outside supported range 1..={MAX_DEGREE}"
            )));
        }
        Ok(Gf2m { degree, poly: POLYNOMIALS[degree as usize] })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> u64 {
        1u64 << self.degree
    }

    pub fn polynomial(&self) -> u64 {
        self.poly
    }

    pub fn contains(&self, x: u64) -> bool {
        x < self.order()
    }

    #[inline]
    pub fn add(&self, x: u64, y: u64) -> u64 {
        x ^ y
    }

    #[inline]
    pub fn mul(&self, mut x: u64, mut y: u64) -> u64 {
        let top = 1u64 << self.degree;
        let mut acc = 0;
        while y != 0 {
            if y & 1 == 1 {
                acc ^= x;
            }
            y >>= 1;
            x <<= 1;
            if x & top != 0 {
                x ^= self.poly;
            }
        }
        acc
    }

    pub fn pow(&self, x: u64, mut e: u64) -> u64 {
        let mut base = x;
        let mut acc = 1;
        while e != 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, x: u64) -> Option<u64> {
        (x != 0).then(|| self.pow(x, self.order() - 2))
    }

    /// Evaluates `Σ coeffs[i]·point^i` by Horner's rule.
    pub fn eval_poly(&self, coeffs: &[u64], point: u64) -> u64 {
        coeffs.iter().rev().fold(0, |acc, &c| self.mul(acc, point) ^ c)
    }
}
