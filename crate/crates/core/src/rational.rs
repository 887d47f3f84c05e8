//! Exact rational numbers and their extension by `+∞`.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A reduced fraction `p/q` with `q > 0`.
///
/// Always rendered as `"p/q"`, including integers (`"2/1"`) and zero (`"0/1"`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(Ratio<i64>);

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));

    /// Builds `p/q`. Panics when `q == 0`.
    pub fn new(p: i64, q: i64) -> Self {
        Rational(Ratio::new(p, q))
    }

    pub fn from_int(n: i64) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn to_f64(self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(self) -> Self {
        Rational(self.0.abs())
    }

    pub fn floor(self) -> i64 {
        self.0.floor().to_integer()
    }

    pub fn ceil(self) -> i64 {
        self.0.ceil().to_integer()
    }

    pub fn recip(self) -> Self {
        Rational(self.0.recip())
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Nearest fraction with the given denominator (ties rounded up).
    pub fn nearest_with_denominator(x: f64, denom: i64) -> Self {
        let p = (x * denom as f64 + 0.5).floor() as i64;
        Rational::new(p, denom)
    }

    /// Least common multiple of the denominators of `values`.
    pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> i64 {
        values.into_iter().fold(1i64, |acc, r| acc.lcm(&r.denom()))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `p/q`, integers and finite decimals such as `-0.125`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational number: {s:?}"));
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Ok(Rational::new(p, q));
        }
        if let Some((int, frac)) = s.split_once('.') {
            let negative = int.starts_with('-');
            let int_digits = int.trim_start_matches(['-', '+']);
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 17 {
                return Err(bad());
            }
            let whole: i64 = if int_digits.is_empty() {
                0
            } else {
                int_digits.parse().map_err(|_| bad())?
            };
            let scale = 10i64.pow(frac.len() as u32);
            let fpart: i64 = frac.parse().map_err(|_| bad())?;
            let magnitude = whole
                .checked_mul(scale)
                .and_then(|w| w.checked_add(fpart))
                .ok_or_else(bad)?;
            let p = if negative { -magnitude } else { magnitude };
            return Ok(Rational::new(p, scale));
        }
        s.parse::<i64>().map(Rational::from_int).map_err(|_| bad())
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

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |a, b| a + b)
    }
}

/// A rational number or `+∞`; used for valuations and truncation orders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtRational {
    Finite(Rational),
    Infinity,
}

impl ExtRational {
    pub fn finite(self) -> Option<Rational> {
        match self {
            ExtRational::Finite(r) => Some(r),
            ExtRational::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtRational::Infinity)
    }

    /// Adds a finite shift; `∞` absorbs.
    pub fn shift(self, by: Rational) -> Self {
        match self {
            ExtRational::Finite(r) => ExtRational::Finite(r + by),
            ExtRational::Infinity => ExtRational::Infinity,
        }
    }
}

impl Add for ExtRational {
    type Output = ExtRational;
    fn add(self, rhs: ExtRational) -> ExtRational {
        match (self, rhs) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => ExtRational::Finite(a + b),
            _ => ExtRational::Infinity,
        }
    }
}

impl From<Rational> for ExtRational {
    fn from(r: Rational) -> Self {
        ExtRational::Finite(r)
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(r) => r.fmt(f),
            ExtRational::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtRational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "+inf" | "infinity" => Ok(ExtRational::Infinity),
            other => other.parse().map(ExtRational::Finite),
        }
    }
}

impl Serialize for ExtRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for `Rational::new`.
pub fn q(p: i64, d: i64) -> Rational {
    Rational::new(p, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_is_always_a_fraction() {
        assert_eq!(q(2, 4).to_string(), "1/2");
        assert_eq!(Rational::from_int(3).to_string(), "3/1");
        assert_eq!(Rational::ZERO.to_string(), "0/1");
        assert_eq!(q(-3, 6).to_string(), "-1/2");
    }

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!("3/10".parse::<Rational>().unwrap(), q(3, 10));
        assert_eq!("-7".parse::<Rational>().unwrap(), Rational::from_int(-7));
        assert_eq!("0.125".parse::<Rational>().unwrap(), q(1, 8));
        assert_eq!("-0.5".parse::<Rational>().unwrap(), q(-1, 2));
        assert_eq!(".25".parse::<Rational>().unwrap(), q(1, 4));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
    }

    #[test]
    fn infinity_orders_above_everything() {
        assert!(ExtRational::Infinity > ExtRational::Finite(Rational::from_int(1_000_000)));
        assert_eq!(ExtRational::Infinity.to_string(), "inf");
        assert_eq!("inf".parse::<ExtRational>().unwrap(), ExtRational::Infinity);
    }

    #[test]
    fn serde_round_trip() {
        let json = serde_json::to_string(&q(1, 5)).unwrap();
        assert_eq!(json, "\"1/5\"");
        let back: Rational = serde_json::from_str(&json).unwrap();
        assert_eq!(back, q(1, 5));
    }
}
