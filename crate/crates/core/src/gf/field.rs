//! Prime-field scalars.
//!
//! A [`Modulus`] can only be built from a prime, so every [`FieldElement`]
//! lives in a genuine field. Elements carry their modulus; combining two
//! elements from different fields is an error, never a silent reduction.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::GfError;

/// A prime modulus `q`. Construction checks primality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Modulus(u64);

impl Modulus {
    pub fn new(q: u64) -> Result<Self, GfError> {
        if is_prime(q) {
            Ok(Modulus(q))
        } else {
            Err(GfError::NotPrime(q))
        }
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    /// Builds an element, reducing `value` mod q.
    #[inline]
    pub fn element(self, value: u64) -> FieldElement {
        FieldElement {
            value: value % self.0,
            modulus: self,
        }
    }

    #[inline]
    pub fn zero(self) -> FieldElement {
        self.element(0)
    }

    #[inline]
    pub fn one(self) -> FieldElement {
        self.element(1)
    }

    /// Maps a signed integer into the field, so `from_i64(-1)` is `q - 1`.
    pub fn from_i64(self, value: i64) -> FieldElement {
        let r = value.rem_euclid(self.0 as i64) as u64;
        self.element(r)
    }

    // Raw residue arithmetic. Callers guarantee both operands are already
    // reduced mod q.

    #[inline]
    pub(crate) fn add_raw(self, a: u64, b: u64) -> u64 {
        let (s, overflow) = a.overflowing_add(b);
        if overflow || s >= self.0 {
            s.wrapping_sub(self.0)
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn sub_raw(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.0 - (b - a)
        }
    }

    #[inline]
    pub(crate) fn mul_raw(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.0 as u128) as u64
    }

    #[inline]
    pub(crate) fn neg_raw(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    pub(crate) fn pow_raw(self, base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.0;
        let mut b = base % self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_raw(acc, b);
            }
            b = self.mul_raw(b, b);
            exp >>= 1;
        }
        acc
    }

    /// Inverse by Fermat's little theorem.
    pub(crate) fn inv_raw(self, a: u64) -> Result<u64, GfError> {
        if a.is_multiple_of(self.0) {
            return Err(GfError::DivisionByZero);
        }
        Ok(self.pow_raw(a, self.0 - 2))
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<'de> Deserialize<'de> for Modulus {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let q = u64::deserialize(d)?;
        Modulus::new(q).map_err(serde::de::Error::custom)
    }
}

/// An element of GF(q), `0 <= value < q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    modulus: Modulus,
}

impl FieldElement {
    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> Modulus {
        self.modulus
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn same_field(self, other: FieldElement) -> Result<Modulus, GfError> {
        if self.modulus == other.modulus {
            Ok(self.modulus)
        } else {
            Err(GfError::ModulusMismatch {
                left: self.modulus.get(),
                right: other.modulus.get(),
            })
        }
    }

    pub fn checked_add(self, rhs: FieldElement) -> Result<FieldElement, GfError> {
        let m = self.same_field(rhs)?;
        Ok(m.element(m.add_raw(self.value, rhs.value)))
    }

    pub fn checked_sub(self, rhs: FieldElement) -> Result<FieldElement, GfError> {
        let m = self.same_field(rhs)?;
        Ok(m.element(m.sub_raw(self.value, rhs.value)))
    }

    pub fn checked_mul(self, rhs: FieldElement) -> Result<FieldElement, GfError> {
        let m = self.same_field(rhs)?;
        Ok(m.element(m.mul_raw(self.value, rhs.value)))
    }

    pub fn checked_div(self, rhs: FieldElement) -> Result<FieldElement, GfError> {
        self.checked_mul(rhs.inv()?)
    }

    pub fn inv(self) -> Result<FieldElement, GfError> {
        let v = self.modulus.inv_raw(self.value)?;
        Ok(self.modulus.element(v))
    }

    pub fn pow(self, exp: u64) -> FieldElement {
        self.modulus.element(self.modulus.pow_raw(self.value, exp))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

// Operator forms panic on a modulus mismatch; use the `checked_*` methods
// where the operands may come from different fields.

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        self.checked_add(rhs).expect("field modulus mismatch")
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        self.checked_sub(rhs).expect("field modulus mismatch")
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        self.checked_mul(rhs).expect("field modulus mismatch")
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.modulus.element(self.modulus.neg_raw(self.value))
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in SMALL {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
