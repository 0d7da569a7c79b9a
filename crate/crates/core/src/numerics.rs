//! Exact dyadic rationals `m / 2^k`.
//!
//! Every value is kept in canonical form: the exponent is zero or the
//! mantissa is odd, and zero is stored as `(0, 0)`. The text form is
//! `m` or `m/2^k` and is what every JSON file in this workspace uses.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseDyadicError {
    #[error("empty dyadic literal")]
    Empty,
    #[error("malformed dyadic literal {0:?} (expected `m` or `m/2^k`)")]
    Malformed(String),
    #[error("{0:?} is not a dyadic rational")]
    NotDyadic(String),
}

/// An element of `Z[1/2]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    mantissa: BigInt,
    exponent: u32,
}

impl DyadicRational {
    /// Builds `mantissa / 2^exponent` and normalizes it.
    pub fn new(mantissa: impl Into<BigInt>, exponent: u32) -> Self {
        Self::normalized(mantissa.into(), exponent)
    }

    fn normalized(mut mantissa: BigInt, mut exponent: u32) -> Self {
        if mantissa.is_zero() {
            return Self {
                mantissa,
                exponent: 0,
            };
        }
        if exponent > 0 {
            let tz = mantissa.trailing_zeros().unwrap_or(0);
            let shift = tz.min(u64::from(exponent)) as u32;
            if shift > 0 {
                mantissa >>= shift;
                exponent -= shift;
            }
        }
        Self { mantissa, exponent }
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Self::new(n, 0)
    }

    /// `2^k` for any signed `k`.
    pub fn pow2(k: i64) -> Self {
        if k >= 0 {
            Self::new(BigInt::one() << (k as u64), 0)
        } else {
            Self::new(1, (-k) as u32)
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.exponent == 0
    }

    pub fn abs(&self) -> Self {
        Self {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    /// Largest integer `<= self`.
    pub fn floor(&self) -> BigInt {
        // BigInt's shift rounds toward negative infinity.
        &self.mantissa >> self.exponent
    }

    /// Smallest integer `>= self`.
    pub fn ceil(&self) -> BigInt {
        -((-&self.mantissa) >> self.exponent)
    }

    /// Multiplies by `2^k`.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if k >= 0 {
            let k = k as u64;
            if u64::from(self.exponent) >= k {
                Self::normalized(self.mantissa.clone(), self.exponent - k as u32)
            } else {
                let up = k - u64::from(self.exponent);
                Self::normalized(&self.mantissa << up, 0)
            }
        } else {
            let e = u64::from(self.exponent) + (-k) as u64;
            Self::normalized(
                self.mantissa.clone(),
                u32::try_from(e).expect("exponent overflow"),
            )
        }
    }

    /// Writes a nonzero value as `odd * 2^v` and returns `(odd, v)`.
    pub fn two_adic(&self) -> Option<(BigInt, i64)> {
        if self.is_zero() {
            return None;
        }
        let tz = self.mantissa.trailing_zeros().unwrap_or(0);
        let odd = &self.mantissa >> tz;
        Some((odd, tz as i64 - i64::from(self.exponent)))
    }

    /// `Some(k)` when `self == 2^k`.
    pub fn power_of_two_exponent(&self) -> Option<i64> {
        match self.two_adic() {
            Some((odd, v)) if odd.is_one() => Some(v),
            _ => None,
        }
    }

    /// `Some(k)` when `self / other == 2^k`; both must be nonzero.
    pub fn ratio_power_of_two(&self, other: &Self) -> Option<i64> {
        let (o1, v1) = self.two_adic()?;
        let (o2, v2) = other.two_adic()?;
        (o1 == o2).then_some(v1 - v2)
    }

    /// `floor(log2(self / other))` for positive operands.
    pub fn floor_log2_ratio(&self, other: &Self) -> i64 {
        assert!(
            self.is_positive() && other.is_positive(),
            "log of nonpositive ratio"
        );
        let bits = |d: &Self| d.mantissa.bits() as i64 - i64::from(d.exponent);
        // Bit lengths bound the answer to within one step.
        let mut t = bits(self) - bits(other);
        while &other.mul_pow2(t) > self {
            t -= 1;
        }
        while &other.mul_pow2(t + 1) <= self {
            t += 1;
        }
        t
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.mantissa.clone(), BigInt::one() << self.exponent)
    }

    pub fn from_rational(r: &BigRational) -> Option<Self> {
        let denom = r.denom();
        if !denom.is_positive() {
            return None;
        }
        let tz = denom.trailing_zeros().unwrap_or(0);
        if !(denom >> tz).is_one() {
            return None;
        }
        Some(Self::normalized(r.numer().clone(), u32::try_from(tz).ok()?))
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.mantissa.to_i64()
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.mantissa.to_f64().unwrap_or(f64::NAN) / 2f64.powi(self.exponent as i32)
    }

    fn aligned(&self, other: &Self) -> (BigInt, BigInt, u32) {
        let e = self.exponent.max(other.exponent);
        (
            &self.mantissa << (e - self.exponent),
            &other.mantissa << (e - other.exponent),
            e,
        )
    }
}

impl Default for DyadicRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for DyadicRational {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<i32> for DyadicRational {
    fn from(n: i32) -> Self {
        Self::from_int(n)
    }
}

impl From<BigInt> for DyadicRational {
    fn from(n: BigInt) -> Self {
        Self::from_int(n)
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add<&DyadicRational> for &DyadicRational {
    type Output = DyadicRational;
    fn add(self, rhs: &DyadicRational) -> DyadicRational {
        let (a, b, e) = self.aligned(rhs);
        DyadicRational::normalized(a + b, e)
    }
}

impl Sub<&DyadicRational> for &DyadicRational {
    type Output = DyadicRational;
    fn sub(self, rhs: &DyadicRational) -> DyadicRational {
        let (a, b, e) = self.aligned(rhs);
        DyadicRational::normalized(a - b, e)
    }
}

impl Mul<&DyadicRational> for &DyadicRational {
    type Output = DyadicRational;
    fn mul(self, rhs: &DyadicRational) -> DyadicRational {
        DyadicRational::normalized(&self.mantissa * &rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Neg for &DyadicRational {
    type Output = DyadicRational;
    fn neg(self) -> DyadicRational {
        DyadicRational {
            mantissa: -&self.mantissa,
            exponent: self.exponent,
        }
    }
}

macro_rules! forward_owned_binop {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for DyadicRational {
            type Output = DyadicRational;
            fn $m(self, rhs: DyadicRational) -> DyadicRational {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&DyadicRational> for DyadicRational {
            type Output = DyadicRational;
            fn $m(self, rhs: &DyadicRational) -> DyadicRational {
                (&self).$m(rhs)
            }
        }
        impl $tr<DyadicRational> for &DyadicRational {
            type Output = DyadicRational;
            fn $m(self, rhs: DyadicRational) -> DyadicRational {
                self.$m(&rhs)
            }
        }
    )*};
}

forward_owned_binop!(Add add, Sub sub, Mul mul);

impl Neg for DyadicRational {
    type Output = DyadicRational;
    fn neg(self) -> DyadicRational {
        DyadicRational {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.mantissa)
        } else {
            write!(f, "{}/2^{}", self.mantissa, self.exponent)
        }
    }
}

impl fmt::Debug for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn is_int_literal(s: &str) -> bool {
    let digits = s.strip_prefix('-').unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|c| c.is_ascii_digit())
}

fn is_uint_literal(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|c| c.is_ascii_digit())
}

impl FromStr for DyadicRational {
    type Err = ParseDyadicError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let s = text.trim();
        if s.is_empty() {
            return Err(ParseDyadicError::Empty);
        }
        let malformed = || ParseDyadicError::Malformed(text.to_string());
        let Some((num, den)) = s.split_once('/') else {
            if !is_int_literal(s) {
                return Err(malformed());
            }
            let m: BigInt = s.parse().map_err(|_| malformed())?;
            return Ok(Self::from_int(m));
        };
        if !is_int_literal(num) {
            return Err(malformed());
        }
        let m: BigInt = num.parse().map_err(|_| malformed())?;
        if let Some(k) = den.strip_prefix("2^") {
            if !is_uint_literal(k) {
                return Err(malformed());
            }
            let k: u32 = k.parse().map_err(|_| malformed())?;
            return Ok(Self::new(m, k));
        }
        // A plain denominator is outside the grammar; say whether it was
        // at least a power of two so the message is useful.
        if !is_uint_literal(den) {
            return Err(malformed());
        }
        let d: BigInt = den.parse().map_err(|_| malformed())?;
        if d.is_zero() {
            return Err(malformed());
        }
        let reduced = BigRational::new(m, d);
        if Self::from_rational(&reduced).is_none() {
            return Err(ParseDyadicError::NotDyadic(text.to_string()));
        }
        Err(malformed())
    }
}

impl Serialize for DyadicRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DyadicRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parity of an integer as a sign, `(-1)^n`.
pub fn parity_sign(n: i64) -> i8 {
    if n.is_even() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> DyadicRational {
        s.parse().unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let half = DyadicRational::new(1, 1);
        let sum = &half + &half;
        assert_eq!(sum, DyadicRational::one());
        assert_eq!(sum.mantissa(), &BigInt::from(1));
        assert_eq!(sum.exponent(), 0);
        assert_eq!(d("3/2^2") * DyadicRational::from(2), d("3/2^1"));
        assert!(d("1/2^2") < d("1/2^1"));
        assert_eq!(d("1/2^2") - d("1/2^1"), d("-1/2^2"));
        assert_eq!(-d("5/2^3"), d("-5/2^3"));
    }

    #[test]
    fn zero_is_unique() {
        let z = DyadicRational::new(0, 17);
        assert_eq!(z.exponent(), 0);
        assert_eq!(z, DyadicRational::zero());
        assert_eq!(d("1/2^3") - d("1/2^3"), DyadicRational::zero());
        assert_eq!(d("0/2^5").to_string(), "0");
    }

    #[test]
    fn codec_examples() {
        assert_eq!(d("3/2^2"), DyadicRational::new(3, 2));
        assert_eq!(DyadicRational::from(-1).to_string(), "-1");
        assert_eq!(d("2/2^1"), DyadicRational::one());
        assert_eq!(d("-6/2^3").to_string(), "-3/2^2");
        assert!(matches!(
            "1/3".parse::<DyadicRational>(),
            Err(ParseDyadicError::NotDyadic(_))
        ));
        assert!(matches!(
            "1/4".parse::<DyadicRational>(),
            Err(ParseDyadicError::Malformed(_))
        ));
        for bad in [
            "", "abc", "1/2^", "1/2^-1", "--1", "1.5", "1/0", "1/2^x", "+1",
        ] {
            assert!(bad.parse::<DyadicRational>().is_err(), "{bad}");
        }
    }

    #[test]
    fn floor_ceil() {
        assert_eq!(d("-1/2^1").floor(), BigInt::from(-1));
        assert_eq!(d("-1/2^1").ceil(), BigInt::from(0));
        assert_eq!(d("7/2^2").floor(), BigInt::from(1));
        assert_eq!(d("7/2^2").ceil(), BigInt::from(2));
        assert_eq!(d("-3").floor(), BigInt::from(-3));
        assert_eq!(d("-3").ceil(), BigInt::from(-3));
    }

    #[test]
    fn powers_of_two() {
        assert_eq!(DyadicRational::pow2(-3), d("1/2^3"));
        assert_eq!(DyadicRational::pow2(4), d("16"));
        assert_eq!(d("8").power_of_two_exponent(), Some(3));
        assert_eq!(d("1/2^5").power_of_two_exponent(), Some(-5));
        assert_eq!(d("3").power_of_two_exponent(), None);
        assert_eq!(d("-2").power_of_two_exponent(), None);
        assert_eq!(d("3/2^2").ratio_power_of_two(&d("3")), Some(-2));
        assert_eq!(d("3").ratio_power_of_two(&d("1")), None);
        assert_eq!(d("3").floor_log2_ratio(&d("1")), 1);
        assert_eq!(d("1").floor_log2_ratio(&d("3")), -2);
        assert_eq!(d("4").floor_log2_ratio(&d("1")), 2);
        assert_eq!(d("1/2^7").mul_pow2(7), DyadicRational::one());
    }

    #[test]
    fn rational_bridge() {
        let r = BigRational::new(BigInt::from(6), BigInt::from(8));
        assert_eq!(DyadicRational::from_rational(&r), Some(d("3/2^2")));
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        assert_eq!(DyadicRational::from_rational(&third), None);
    }

    #[test]
    fn serde_as_string() {
        let v = d("-5/2^4");
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, "\"-5/2^4\"");
        let back: DyadicRational = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
        assert!(serde_json::from_str::<DyadicRational>("\"1/3\"").is_err());
    }
}
