//! Arbitrary-precision exact rationals.
//!
//! Every exact quantity in the crate (discrepancies, Φ constants, `c_b^σ`)
//! is a [`Rational`]. Values are always stored reduced with a positive
//! denominator, so structural equality is numeric equality.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Exact signed rational `p/q` with `q > 0` and `gcd(|p|, q) = 1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, Error> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(BigRational::new(numer.into(), denom)))
    }

    /// Shorthand for small literals. Panics on a zero denominator.
    pub fn frac(numer: i64, denom: i64) -> Self {
        Self::new(numer, denom).expect("zero denominator")
    }

    pub fn integer(value: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(value.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Rational, Error> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    /// Integer power; negative exponents require a nonzero base.
    pub fn pow(&self, exp: i32) -> Result<Rational, Error> {
        if exp < 0 && self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(num_traits::Pow::pow(&self.0, exp)))
    }

    /// `1 / b^e` as an exact value.
    pub fn inv_pow(base: u64, exp: u32) -> Rational {
        Rational(BigRational::new(
            BigInt::one(),
            num_traits::pow(BigInt::from(base), exp as usize),
        ))
    }

    /// Floor of the value as a big integer.
    pub fn floor(&self) -> BigInt {
        self.numer().div_floor(self.denom())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal expansion with exactly `digits` fractional digits,
    /// rounded half to even.
    pub fn to_decimal(&self, digits: u32) -> String {
        let scale = num_traits::pow(BigInt::from(10), digits as usize);
        let scaled = self.0.abs() * BigRational::from_integer(scale);
        let (mut q, r) = scaled.numer().div_rem(scaled.denom());
        let twice = r * 2u32;
        match twice.cmp(scaled.denom()) {
            std::cmp::Ordering::Greater => q += 1u32,
            std::cmp::Ordering::Equal if q.is_odd() => q += 1u32,
            _ => {}
        }
        let negative = self.is_negative() && !q.is_zero();
        format_fixed(&q, digits, negative)
    }
}

/// Renders `magnitude / 10^digits` with a fixed number of fractional digits.
pub(crate) fn format_fixed(magnitude: &BigInt, digits: u32, negative: bool) -> String {
    let mut s = magnitude.to_string();
    let digits = digits as usize;
    if s.len() <= digits {
        s = format!("{}{}", "0".repeat(digits + 1 - s.len()), s);
    }
    let split = s.len() - digits;
    let mut out = String::with_capacity(s.len() + 2);
    if negative {
        out.push('-');
    }
    out.push_str(&s[..split]);
    if digits > 0 {
        out.push('.');
        out.push_str(&s[split..]);
    }
    out
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational: {s:?}"));
        match s.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| bad())?;
                let q: BigInt = q.trim().parse().map_err(|_| bad())?;
                Rational::new(p, q)
            }
            None => Ok(Rational::integer(s.parse::<BigInt>().map_err(|_| bad())?)),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! from_int {
    ($($t:ty),*) => {$(
        impl From<$t> for Rational {
            fn from(v: $t) -> Self {
                Rational::integer(v)
            }
        }
    )*};
}
from_int!(i32, i64, i128, u32, u64, usize, BigInt);

macro_rules! binop {
    ($tr:ident, $method:ident, $assign_tr:ident, $assign:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $tr<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
        impl<'a, 'b> $tr<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $assign_tr for Rational {
            fn $assign(&mut self, rhs: Rational) {
                self.0.$assign(rhs.0)
            }
        }
        impl<'a> $assign_tr<&'a Rational> for Rational {
            fn $assign(&mut self, rhs: &'a Rational) {
                self.0.$assign(&rhs.0)
            }
        }
    };
}
binop!(Add, add, AddAssign, add_assign);
binop!(Sub, sub, SubAssign, sub_assign);
binop!(Mul, mul, MulAssign, mul_assign);

// Division by zero panics, matching integer division; use `checked_div`
// where the divisor is data.
impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "rational division by zero");
        Rational(self.0 / rhs.0)
    }
}

impl<'b> Div<&'b Rational> for &Rational {
    type Output = Rational;
    fn div(self, rhs: &'b Rational) -> Rational {
        assert!(!rhs.is_zero(), "rational division by zero");
        Rational(&self.0 / &rhs.0)
    }
}

impl<'a> Div<&'a Rational> for Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        &self / rhs
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}
