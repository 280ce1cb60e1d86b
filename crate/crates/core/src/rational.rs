//! Arbitrary-precision signed rationals.
//!
//! [`ExactRational`] is a thin newtype over [`num_rational::BigRational`],
//! which already keeps values in lowest terms with a positive denominator.
//! The newtype fixes the textual forms used across the crate: `num/den`
//! always (integers render as `n/1`) and a correctly rounded decimal.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return domain("zero denominator");
        }
        Ok(Self(BigRational::new(numer.into(), denom)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    /// Always positive.
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn abs(&self) -> Self {
        Self(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return domain("reciprocal of zero");
        }
        Ok(Self(self.0.recip()))
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, exp: i32) -> Result<Self> {
        if exp < 0 && self.is_zero() {
            return domain("negative power of zero");
        }
        Ok(Self(num_traits::Pow::pow(&self.0, exp)))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return domain("division by zero");
        }
        Ok(Self(&self.0 / &rhs.0))
    }

    /// Nearest `f64`; large operands are scaled before conversion so the
    /// result stays finite whenever the value itself is representable.
    pub fn to_f64(&self) -> f64 {
        if let (Some(n), Some(d)) = (self.numer().to_f64(), self.denom().to_f64()) {
            if n.is_finite() && d.is_finite() {
                return n / d;
            }
        }
        // Bring |n/d| to a 64-bit mantissa, then rescale by a power of two.
        let n = self.numer().magnitude();
        let d = self.denom().magnitude();
        let e = n.bits() as i64 - d.bits() as i64;
        let shift = 64 - e;
        let mantissa = if shift >= 0 {
            (n << shift as u64) / d
        } else {
            n / (d << (-shift) as u64)
        };
        let m = mantissa.to_f64().unwrap_or(f64::NAN);
        let p = (-shift).clamp(-4000, 4000) as i32;
        let v = m * 2f64.powi(p / 2) * 2f64.powi(p - p / 2);
        if self.numer().is_negative() {
            -v
        } else {
            v
        }
    }

    /// Decimal rendering with exactly `digits` fractional digits, rounded
    /// half away from zero.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scale = BigInt::from(10u32).pow(digits as u32);
        let scaled = self.numer().abs() * &scale;
        let den = self.denom();
        let (q, r) = scaled.div_rem(den);
        let rounded = if r * 2u32 >= *den { q + 1u32 } else { q };
        let (int_part, frac_part) = rounded.div_rem(&scale);
        let sign = if self.numer().is_negative() && !rounded_is_zero(&int_part, &frac_part) {
            "-"
        } else {
            ""
        };
        if digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!(
                "{sign}{int_part}.{:0>width$}",
                frac_part.to_string(),
                width = digits
            )
        }
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }

    pub fn into_inner(self) -> BigRational {
        self.0
    }
}

fn rounded_is_zero(a: &BigInt, b: &BigInt) -> bool {
    a.is_zero() && b.is_zero()
}

impl From<BigRational> for ExactRational {
    fn from(r: BigRational) -> Self {
        Self(r)
    }
}

impl From<BigInt> for ExactRational {
    fn from(n: BigInt) -> Self {
        Self::from_integer(n)
    }
}

impl From<BigUint> for ExactRational {
    fn from(n: BigUint) -> Self {
        Self::from_integer(BigInt::from_biguint(Sign::Plus, n))
    }
}

impl From<i64> for ExactRational {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for ExactRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Domain(format!("not a rational: {s:?}")))
        };
        match s.split_once('/') {
            Some((n, d)) => Self::new(parse(n)?, parse(d)?),
            None => Ok(Self::from_integer(parse(s)?)),
        }
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational($trait::$method(self.0, rhs.0))
            }
        }

        impl<'a> $trait<&'a ExactRational> for &'a ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational($trait::$method(&self.0, &rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
// Panics on a zero divisor like every other `Div`; use `checked_div` on untrusted input.
forward_binop!(Div, div);

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

impl Sum for ExactRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| acc + x)
    }
}

impl Product for ExactRational {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::one(), |acc, x| acc * x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> ExactRational {
        ExactRational::new(n, d).unwrap()
    }

    #[test]
    fn lowest_terms_positive_denominator() {
        let r = q(6, -8);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(4));
        assert_eq!(r.to_string(), "-3/4");
        assert_eq!(ExactRational::from(2).to_string(), "2/1");
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(matches!(ExactRational::new(1, 0), Err(Error::Domain(_))));
        assert!(ExactRational::zero().recip().is_err());
        assert!(q(1, 2).checked_div(&ExactRational::zero()).is_err());
    }

    #[test]
    fn decimal_rounding() {
        assert_eq!(q(1, 2).to_decimal(0), "1");
        assert_eq!(q(15, 88).to_decimal(6), "0.170455");
        assert_eq!(q(1, 3).to_decimal(4), "0.3333");
        assert_eq!(q(2, 3).to_decimal(4), "0.6667");
        assert_eq!(q(-1, 8).to_decimal(2), "-0.13");
        assert_eq!(q(-1, 1000).to_decimal(2), "0.00");
        assert_eq!(q(7, 1).to_decimal(3), "7.000");
    }

    #[test]
    fn parse_and_arith() {
        let a: ExactRational = "3/80".parse().unwrap();
        let b: ExactRational = "77/80".parse().unwrap();
        assert_eq!(a + b, ExactRational::one());
        assert_eq!(q(2, 3).pow(-2).unwrap(), q(9, 4));
        assert_eq!(
            "5".parse::<ExactRational>().unwrap(),
            ExactRational::from(5)
        );
        assert!("x/2".parse::<ExactRational>().is_err());
    }

    #[test]
    fn huge_to_f64() {
        let big = BigInt::from(10u32).pow(400);
        let r = ExactRational::new(big.clone() * 3, big * 4).unwrap();
        assert_eq!(r.to_f64(), 0.75);
        let tiny = ExactRational::new(BigInt::one(), BigInt::from(10u32).pow(400) * 3 + 1).unwrap();
        assert_eq!(tiny.to_f64(), 0.0);
        let small = ExactRational::new(BigInt::from(7), BigInt::from(10u32).pow(300)).unwrap();
        assert!((small.to_f64() / 7e-300 - 1.0).abs() < 1e-10);
        assert_eq!((-r).to_f64(), -0.75);
    }
}
