//! Truncated Novikov series `Σ c_i T^{λ_i}` with rational exponents and
//! complex coefficients, together with gapped monoids of exponents.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{ExtRational, Rational};

/// Coefficients with modulus at or below this are treated as zero.
pub const ZERO_TOL: f64 = 1e-12;

/// A series known modulo `T^order`.
///
/// Terms are sorted by strictly increasing exponent, every exponent lies
/// below `order`, and no coefficient is (numerically) zero.
#[derive(Clone, Debug, PartialEq)]
pub struct NovikovScalar {
    terms: Vec<(Rational, Complex64)>,
    order: ExtRational,
}

impl NovikovScalar {
    /// Builds a series from arbitrary terms, merging duplicates and
    /// discarding anything at or above `order`.
    pub fn from_terms(
        terms: impl IntoIterator<Item = (Rational, Complex64)>,
        order: ExtRational,
    ) -> Self {
        let mut acc: BTreeMap<Rational, Complex64> = BTreeMap::new();
        for (e, c) in terms {
            if ExtRational::Finite(e) < order {
                *acc.entry(e).or_default() += c;
            }
        }
        NovikovScalar {
            terms: acc
                .into_iter()
                .filter(|(_, c)| c.norm() > ZERO_TOL)
                .collect(),
            order,
        }
    }

    pub fn zero() -> Self {
        NovikovScalar {
            terms: Vec::new(),
            order: ExtRational::Infinity,
        }
    }

    /// The class of zero modulo `T^order`.
    pub fn zero_mod(order: Rational) -> Self {
        NovikovScalar {
            terms: Vec::new(),
            order: order.into(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(c, Rational::ZERO)
    }

    pub fn real(c: f64) -> Self {
        Self::constant(Complex64::new(c, 0.0))
    }

    /// `c·T^e`, exact.
    pub fn monomial(c: Complex64, e: Rational) -> Self {
        Self::from_terms([(e, c)], ExtRational::Infinity)
    }

    pub fn terms(&self) -> &[(Rational, Complex64)] {
        &self.terms
    }

    pub fn order(&self) -> ExtRational {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exponent of the first nonzero term; `+∞` for the zero class.
    pub fn valuation(&self) -> ExtRational {
        self.terms
            .first()
            .map_or(ExtRational::Infinity, |(e, _)| ExtRational::Finite(*e))
    }

    /// `min(valuation, order)`: what is certain about the valuation.
    pub fn valuation_bound(&self) -> ExtRational {
        self.valuation().min(self.order)
    }

    pub fn coefficient(&self, e: Rational) -> Complex64 {
        self.terms
            .binary_search_by(|(x, _)| x.cmp(&e))
            .map_or(Complex64::new(0.0, 0.0), |i| self.terms[i].1)
    }

    pub fn leading(&self) -> Option<(Rational, Complex64)> {
        self.terms.first().copied()
    }

    /// Reduces modulo `T^order` (never raises the current order).
    pub fn truncate(&self, order: ExtRational) -> Self {
        let order = order.min(self.order);
        NovikovScalar {
            terms: self
                .terms
                .iter()
                .copied()
                .filter(|(e, _)| ExtRational::Finite(*e) < order)
                .collect(),
            order,
        }
    }

    /// Multiplies by `T^e`.
    pub fn shift(&self, e: Rational) -> Self {
        NovikovScalar {
            terms: self.terms.iter().map(|(x, c)| (*x + e, *c)).collect(),
            order: self.order.shift(e),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        if c.norm() <= ZERO_TOL {
            return NovikovScalar {
                terms: Vec::new(),
                order: self.order,
            };
        }
        NovikovScalar {
            terms: self
                .terms
                .iter()
                .map(|(e, x)| (*e, x * c))
                .filter(|(_, x)| x.norm() > ZERO_TOL)
                .collect(),
            order: self.order,
        }
    }

    /// Inverse modulo `T^order`; the result order is also capped by the
    /// precision of `self`.
    pub fn invert(&self, order: Rational) -> Result<Self> {
        let (v, c) = self.leading().ok_or(Error::NotInvertible)?;
        let cinv = c.inv();
        // self = c T^v (1 + u) with ν(u) > 0
        let u = self.shift(-v).scale(cinv) - NovikovScalar::one();
        let rel_order = ExtRational::Finite(order + v).min(self.order.shift(-v));
        let geometric = geometric_inverse(&u, rel_order);
        Ok(geometric.scale(cinv).shift(-v))
    }

    /// `exp(self)` modulo `T^order`; requires a non-negative valuation.
    pub fn exp(&self, order: Rational) -> Result<Self> {
        if let ExtRational::Finite(v) = self.valuation() {
            if v.is_negative() {
                return Err(Error::NotInLambda0(v));
            }
        }
        let r0 = self.coefficient(Rational::ZERO);
        let positive = NovikovScalar {
            terms: self
                .terms
                .iter()
                .copied()
                .filter(|(e, _)| e.is_positive())
                .collect(),
            order: self.order,
        };
        let target = if positive.is_zero() && positive.order.is_infinite() {
            ExtRational::Infinity
        } else {
            ExtRational::Finite(order).min(self.order)
        };
        // untrimmed accumulation; small terms are dropped only at the end
        let mut sum: BTreeMap<Rational, Complex64> = BTreeMap::new();
        if ExtRational::Finite(Rational::ZERO) < target {
            sum.insert(Rational::ZERO, Complex64::new(1.0, 0.0));
        }
        let mut power = sum.clone();
        let mut n = 1.0;
        while !power.is_empty() && !positive.is_zero() {
            let mut next: BTreeMap<Rational, Complex64> = BTreeMap::new();
            for (ea, ca) in &power {
                for (eb, cb) in &positive.terms {
                    let e = *ea + *eb;
                    if ExtRational::Finite(e) >= target {
                        break;
                    }
                    *next.entry(e).or_default() += ca * cb / n;
                }
            }
            for (e, c) in &next {
                *sum.entry(*e).or_default() += c;
            }
            power = next;
            n += 1.0;
        }
        // tiny terms of an exponential are genuine, so only exact zeros go
        let c0 = r0.exp();
        Ok(NovikovScalar {
            terms: sum
                .into_iter()
                .map(|(e, c)| (e, c * c0))
                .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
                .collect(),
            order: target,
        })
    }

    /// Agreement modulo `T^g` with coefficient tolerance `tol`.
    pub fn eq_mod(&self, other: &Self, g: Rational, tol: f64) -> bool {
        let diff = self - other;
        diff.terms
            .iter()
            .filter(|(e, _)| *e < g)
            .all(|(_, c)| c.norm() <= tol)
    }

    /// Numerical value at `T = t > 0` of the known part.
    pub fn eval_at(&self, t: f64) -> Complex64 {
        self.terms.iter().map(|(e, c)| c * t.powf(e.to_f64())).sum()
    }

    /// `self^n` modulo `T^order` for any integer `n`.
    pub fn powi(&self, n: i32, order: Rational) -> Result<Self> {
        let base = if n < 0 {
            self.invert(order)?
        } else {
            self.clone()
        };
        let mut acc = NovikovScalar::one();
        for _ in 0..n.unsigned_abs() {
            acc = (&acc * &base).truncate(order.into());
        }
        Ok(acc)
    }
}

/// `(1 + u)^{-1}` modulo `T^order` for `ν(u) > 0`.
fn geometric_inverse(u: &NovikovScalar, order: ExtRational) -> NovikovScalar {
    let mut sum = NovikovScalar::one().truncate(order);
    if u.is_zero() && u.order.is_infinite() {
        return sum;
    }
    let minus_u = -u;
    let mut power = NovikovScalar::one();
    loop {
        power = (&power * &minus_u).truncate(order);
        if power.is_zero() {
            break;
        }
        sum = &sum + &power;
    }
    // a finite-order zero u still caps the precision
    sum.truncate(order.min(u.order))
}

impl Add for &NovikovScalar {
    type Output = NovikovScalar;
    fn add(self, rhs: &NovikovScalar) -> NovikovScalar {
        let order = self.order.min(rhs.order);
        let mut out = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < rhs.terms.len() {
            let next = match (self.terms.get(i), rhs.terms.get(j)) {
                (Some(a), Some(b)) if a.0 == b.0 => {
                    i += 1;
                    j += 1;
                    (a.0, a.1 + b.1)
                }
                (Some(a), Some(b)) if a.0 < b.0 => {
                    i += 1;
                    *a
                }
                (Some(_), Some(b)) => {
                    j += 1;
                    *b
                }
                (Some(a), None) => {
                    i += 1;
                    *a
                }
                (None, Some(b)) => {
                    j += 1;
                    *b
                }
                (None, None) => unreachable!(),
            };
            if ExtRational::Finite(next.0) < order && next.1.norm() > ZERO_TOL {
                out.push(next);
            }
        }
        NovikovScalar { terms: out, order }
    }
}

impl Neg for &NovikovScalar {
    type Output = NovikovScalar;
    fn neg(self) -> NovikovScalar {
        NovikovScalar {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
            order: self.order,
        }
    }
}

impl Sub for &NovikovScalar {
    type Output = NovikovScalar;
    fn sub(self, rhs: &NovikovScalar) -> NovikovScalar {
        self + &(-rhs)
    }
}

impl Sub for NovikovScalar {
    type Output = NovikovScalar;
    fn sub(self, rhs: NovikovScalar) -> NovikovScalar {
        &self - &rhs
    }
}

impl Add for NovikovScalar {
    type Output = NovikovScalar;
    fn add(self, rhs: NovikovScalar) -> NovikovScalar {
        &self + &rhs
    }
}

impl Mul for &NovikovScalar {
    type Output = NovikovScalar;
    fn mul(self, rhs: &NovikovScalar) -> NovikovScalar {
        // x = x̄ + O(T^ox), y = ȳ + O(T^oy)
        let order = (self.order + rhs.valuation())
            .min(rhs.order + self.valuation())
            .min(self.order + rhs.order);
        let mut acc: BTreeMap<Rational, Complex64> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = *ea + *eb;
                if ExtRational::Finite(e) >= order {
                    break;
                }
                *acc.entry(e).or_default() += ca * cb;
            }
        }
        NovikovScalar {
            terms: acc
                .into_iter()
                .filter(|(_, c)| c.norm() > ZERO_TOL)
                .collect(),
            order,
        }
    }
}

impl Mul for NovikovScalar {
    type Output = NovikovScalar;
    fn mul(self, rhs: NovikovScalar) -> NovikovScalar {
        &self * &rhs
    }
}

impl fmt::Display for NovikovScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            f.write_str("0")?;
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({}{:+}i)", c.re, c.im)?;
            }
            if !e.is_zero() {
                write!(f, "·T^({e})")?;
            }
        }
        if let ExtRational::Finite(o) = self.order {
            write!(f, " + O(T^({o}))")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exp: Rational,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct ScalarRepr {
    terms: Vec<TermRepr>,
    order: ExtRational,
}

impl Serialize for NovikovScalar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ScalarRepr {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermRepr {
                    exp: *e,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
            order: self.order,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for NovikovScalar {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = ScalarRepr::deserialize(deserializer)?;
        Ok(NovikovScalar::from_terms(
            repr.terms
                .into_iter()
                .map(|t| (t.exp, Complex64::new(t.re, t.im))),
            repr.order,
        ))
    }
}

/// A finitely generated monoid of positive rationals, plus zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GappedMonoid {
    generators: Vec<Rational>,
}

impl GappedMonoid {
    pub fn new(generators: impl IntoIterator<Item = Rational>) -> Result<Self> {
        let set: BTreeSet<Rational> = generators.into_iter().collect();
        if let Some(bad) = set.iter().find(|g| !g.is_positive()) {
            return Err(Error::InvalidMonoid(format!(
                "generator {bad} is not positive"
            )));
        }
        Ok(GappedMonoid {
            generators: set.into_iter().collect(),
        })
    }

    pub fn generators(&self) -> &[Rational] {
        &self.generators
    }

    /// All elements `≤ cutoff` in increasing order (always starts with 0).
    pub fn enumerate(&self, cutoff: Rational) -> Vec<Rational> {
        let mut seen = BTreeSet::from([Rational::ZERO]);
        let mut frontier = vec![Rational::ZERO];
        while let Some(x) = frontier.pop() {
            for g in &self.generators {
                let y = x + *g;
                if y <= cutoff && seen.insert(y) {
                    frontier.push(y);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Smallest element strictly above `x`, if the monoid has generators.
    pub fn next_above(&self, x: Rational) -> Option<Rational> {
        let step = *self.generators.first()?;
        self.enumerate(x + step).into_iter().find(|e| *e > x)
    }

    pub fn contains(&self, x: Rational) -> bool {
        x >= Rational::ZERO && self.enumerate(x).last() == Some(&x)
    }
}
