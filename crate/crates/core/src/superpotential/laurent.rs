//! Laurent polynomials in `p_0..p_{k-1}, q_0..q_{k-1}` over Novikov series.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::novikov::{NovikovScalar, ZERO_TOL};
use crate::rational::{ExtRational, Rational};

/// Exponent vector: entries `0..k` belong to `p_i`, entries `k..2k` to `q_i`.
pub type Monomial = Vec<i32>;

#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly {
    k: usize,
    terms: BTreeMap<Monomial, NovikovScalar>,
}

impl LaurentPoly {
    pub fn zero(k: usize) -> Self {
        LaurentPoly {
            k,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(k: usize, exps: Monomial, coeff: NovikovScalar) -> Self {
        let mut out = Self::zero(k);
        out.add_term(exps, coeff);
        out
    }

    /// The single variable `p_i`.
    pub fn p(k: usize, i: usize, power: i32) -> Self {
        let mut e = vec![0; 2 * k];
        e[i] = power;
        Self::monomial(k, e, NovikovScalar::one())
    }

    /// The single variable `q_i`.
    pub fn q(k: usize, i: usize, power: i32) -> Self {
        let mut e = vec![0; 2 * k];
        e[k + i] = power;
        Self::monomial(k, e, NovikovScalar::one())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn nvars(&self) -> usize {
        2 * self.k
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &NovikovScalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exps: Monomial, coeff: NovikovScalar) {
        assert_eq!(
            exps.len(),
            self.nvars(),
            "monomial has the wrong number of variables"
        );
        let merged = match self.terms.remove(&exps) {
            Some(old) => &old + &coeff,
            None => coeff,
        };
        if !merged.is_zero() || !merged.order().is_infinite() {
            self.terms.insert(exps, merged);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.k);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    /// Multiplies every coefficient by `s`.
    pub fn scale(&self, s: &NovikovScalar) -> Self {
        let mut out = Self::zero(self.k);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * s);
        }
        out
    }

    /// `∂/∂x_j`.
    pub fn derivative(&self, j: usize) -> Self {
        let mut out = Self::zero(self.k);
        for (m, c) in &self.terms {
            if m[j] != 0 {
                let mut e = m.clone();
                e[j] -= 1;
                out.add_term(e, c.scale(Complex64::new(m[j] as f64, 0.0)));
            }
        }
        out
    }

    /// `x_j ∂/∂x_j`.
    pub fn log_derivative(&self, j: usize) -> Self {
        let mut out = Self::zero(self.k);
        for (m, c) in &self.terms {
            if m[j] != 0 {
                out.add_term(m.clone(), c.scale(Complex64::new(m[j] as f64, 0.0)));
            }
        }
        out
    }

    /// All partial derivatives, `p` variables first.
    pub fn grad(&self) -> Vec<LaurentPoly> {
        (0..self.nvars()).map(|j| self.derivative(j)).collect()
    }

    /// Substitutes series of valuation zero. Powers are formed modulo
    /// `T^{rel_order}`, so each term is known modulo `T^{ν(coeff) + rel_order}`.
    pub fn evaluate(&self, values: &[NovikovScalar], rel_order: Rational) -> Result<NovikovScalar> {
        self.evaluate_with(&mut PowerCache::new(values, rel_order))
    }

    /// As [`LaurentPoly::evaluate`], sharing powers across several polynomials.
    pub fn evaluate_with(&self, cache: &mut PowerCache<'_>) -> Result<NovikovScalar> {
        assert_eq!(cache.values.len(), self.nvars());
        let rel = ExtRational::Finite(cache.rel_order);
        let mut total = NovikovScalar::zero();
        for (m, c) in &self.terms {
            let mut acc = NovikovScalar::one();
            for (j, &e) in m.iter().enumerate() {
                if e != 0 {
                    acc = (&acc * cache.power(j, e)?).truncate(rel);
                }
            }
            let shift = c.valuation().finite().unwrap_or(Rational::ZERO);
            total = &total + &(c * &acc).truncate(ExtRational::Finite(shift + cache.rel_order));
        }
        Ok(total)
    }

    /// Magnitude bound matching [`LaurentPoly::evaluate_with`]: the same sum
    /// with every coefficient replaced by its modulus. Used as the scale
    /// for deciding which computed coefficients are rounding noise.
    pub fn magnitude_with(&self, cache: &mut PowerCache<'_>) -> Result<NovikovScalar> {
        let rel = ExtRational::Finite(cache.rel_order);
        let mut total = NovikovScalar::zero();
        for (m, c) in &self.terms {
            let mut acc = NovikovScalar::one();
            for (j, &e) in m.iter().enumerate() {
                if e != 0 {
                    acc = (&acc * &abs_series(cache.power(j, e)?)).truncate(rel);
                }
            }
            let shift = c.valuation().finite().unwrap_or(Rational::ZERO);
            total = &total
                + &(&abs_series(c) * &acc).truncate(ExtRational::Finite(shift + cache.rel_order));
        }
        Ok(total)
    }

    /// Numerical value at `T = t` and complex arguments.
    pub fn eval_numeric(&self, z: &[Complex64], t: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(m, c)| c.eval_at(t) * monomial_value(m, z))
            .sum()
    }

    /// Coefficients at `T = t`.
    pub fn at(&self, t: f64) -> Vec<(Monomial, Complex64)> {
        self.terms
            .iter()
            .map(|(m, c)| (m.clone(), c.eval_at(t)))
            .collect()
    }

    /// Coefficient of `T^e` in each term, dropping zeros.
    pub fn slice(&self, e: Rational) -> Vec<(Monomial, Complex64)> {
        self.terms
            .iter()
            .map(|(m, c)| (m.clone(), c.coefficient(e)))
            .filter(|(_, c)| c.norm() > 0.0)
            .collect()
    }

    pub fn variable_name(&self, j: usize) -> String {
        if j < self.k {
            format!("p{j}")
        } else {
            format!("q{}", j - self.k)
        }
    }

    fn monomial_string(&self, m: &Monomial) -> String {
        let parts: Vec<String> = m
            .iter()
            .enumerate()
            .filter(|(_, e)| **e != 0)
            .map(|(j, e)| {
                if *e == 1 {
                    self.variable_name(j)
                } else {
                    format!("{}^{}", self.variable_name(j), e)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("·")
        }
    }
}

/// Memoized integer powers of substituted series.
pub struct PowerCache<'a> {
    values: &'a [NovikovScalar],
    rel_order: Rational,
    cache: HashMap<(usize, i32), NovikovScalar>,
}

impl<'a> PowerCache<'a> {
    pub fn new(values: &'a [NovikovScalar], rel_order: Rational) -> Self {
        PowerCache {
            values,
            rel_order,
            cache: HashMap::new(),
        }
    }

    fn power(&mut self, j: usize, e: i32) -> Result<&NovikovScalar> {
        if !self.cache.contains_key(&(j, e)) {
            let v = self.values[j].powi(e, self.rel_order)?;
            self.cache.insert((j, e), v);
        }
        Ok(&self.cache[&(j, e)])
    }
}

fn abs_series(x: &NovikovScalar) -> NovikovScalar {
    NovikovScalar::from_terms(
        x.terms()
            .iter()
            .map(|(e, c)| (*e, Complex64::new(c.norm(), 0.0))),
        x.order(),
    )
}

/// Valuation of `value` ignoring coefficients below `ZERO_TOL` times the
/// largest coefficient of `magnitude` (or absolutely, if that is below 1).
pub fn significant_valuation(value: &NovikovScalar, magnitude: &NovikovScalar) -> ExtRational {
    let scale = magnitude
        .terms()
        .iter()
        .map(|(_, c)| c.norm())
        .fold(1.0, f64::max);
    value
        .terms()
        .iter()
        .find(|(_, c)| c.norm() > ZERO_TOL * scale)
        .map_or(value.order(), |(e, _)| ExtRational::Finite(*e))
}

/// `Π z_j^{m_j}`.
pub fn monomial_value(m: &[i32], z: &[Complex64]) -> Complex64 {
    m.iter()
        .zip(z)
        .filter(|(e, _)| **e != 0)
        .map(|(e, x)| x.powi(*e))
        .product()
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("({c})·{}", self.monomial_string(m)))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

#[derive(Serialize)]
struct TermRepr<'a> {
    monomial: String,
    exponents: &'a Monomial,
    coeff: &'a NovikovScalar,
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.terms.iter().map(|(m, c)| TermRepr {
            monomial: self.monomial_string(m),
            exponents: m,
            coeff: c,
        }))
    }
}
