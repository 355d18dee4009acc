//! Exact dyadic rationals: integers scaled by a nonnegative power of two.
//!
//! Every density produced by the difference-law recurrences is dyadic, so
//! this type is the value space of the whole crate. Values are kept in
//! canonical form (odd numerator whenever the exponent is positive, exponent
//! zero for zero), which makes structural equality coincide with numerical
//! equality.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul, Neg, Sub};

/// `numerator / 2^exponent`, canonical.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    num: BigInt,
    exp: u64,
}

impl DyadicRational {
    pub fn new(num: impl Into<BigInt>, exp: u64) -> Self {
        Self::canonical(num.into(), exp)
    }

    fn canonical(mut num: BigInt, mut exp: u64) -> Self {
        if num.is_zero() {
            return Self { num, exp: 0 };
        }
        if exp > 0 {
            let tz = num.trailing_zeros().unwrap_or(0).min(exp);
            if tz > 0 {
                num >>= tz;
                exp -= tz;
            }
        }
        Self { num, exp }
    }

    pub fn zero() -> Self {
        Self { num: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Self { num: BigInt::from(1), exp: 0 }
    }

    pub fn half() -> Self {
        Self { num: BigInt::from(1), exp: 1 }
    }

    pub fn from_int(v: i64) -> Self {
        Self { num: BigInt::from(v), exp: 0 }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> u64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.num.is_positive()
    }

    /// Value divided by `2^k`; stays canonical because the numerator is
    /// untouched.
    pub fn div_pow2(&self, k: u64) -> Self {
        if self.is_zero() {
            Self::zero()
        } else {
            Self { num: self.num.clone(), exp: self.exp + k }
        }
    }

    pub fn mul_int(&self, c: i64) -> Self {
        Self::canonical(&self.num * c, self.exp)
    }

    pub fn abs(&self) -> Self {
        Self { num: self.num.abs(), exp: self.exp }
    }

    pub fn to_f64(&self) -> f64 {
        self.num.to_f64().unwrap_or(f64::NAN) * f64::exp2(-(self.exp as f64))
    }

    fn cmp_value(&self, other: &Self) -> Ordering {
        let e = self.exp.max(other.exp);
        let lhs = &self.num << (e - self.exp);
        let rhs = &other.num << (e - other.exp);
        lhs.cmp(&rhs)
    }
}

impl Add for &DyadicRational {
    type Output = DyadicRational;
    fn add(self, rhs: &DyadicRational) -> DyadicRational {
        let e = self.exp.max(rhs.exp);
        let num = (&self.num << (e - self.exp)) + (&rhs.num << (e - rhs.exp));
        DyadicRational::canonical(num, e)
    }
}

impl Sub for &DyadicRational {
    type Output = DyadicRational;
    fn sub(self, rhs: &DyadicRational) -> DyadicRational {
        let e = self.exp.max(rhs.exp);
        let num = (&self.num << (e - self.exp)) - (&rhs.num << (e - rhs.exp));
        DyadicRational::canonical(num, e)
    }
}

impl Mul for &DyadicRational {
    type Output = DyadicRational;
    fn mul(self, rhs: &DyadicRational) -> DyadicRational {
        DyadicRational::canonical(&self.num * &rhs.num, self.exp + rhs.exp)
    }
}

impl Neg for &DyadicRational {
    type Output = DyadicRational;
    fn neg(self) -> DyadicRational {
        DyadicRational { num: -&self.num, exp: self.exp }
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_value(other)
    }
}

impl<'a> Sum<&'a DyadicRational> for DyadicRational {
    fn sum<I: Iterator<Item = &'a DyadicRational>>(iter: I) -> Self {
        iter.fold(DyadicRational::zero(), |acc, x| &acc + x)
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

impl Serialize for DyadicRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("DyadicRational", 3)?;
        s.serialize_field("num", &self.num.to_string())?;
        s.serialize_field("exp2", &self.exp)?;
        s.serialize_field("float", &self.to_f64())?;
        s.end()
    }
}
