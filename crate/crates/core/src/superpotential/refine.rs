//! Order-by-order solution of `dW = 0` over a gapped monoid.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::laurent::{significant_valuation, PowerCache};
use super::leading::Branch;
use super::SuperpotentialData;
use crate::error::{Error, Result};
use crate::novikov::{GappedMonoid, NovikovScalar};
use crate::rational::{ExtRational, Rational};

/// A (possibly truncated) critical point `(p, q)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub p: Vec<NovikovScalar>,
    pub q: Vec<NovikovScalar>,
    pub solved_order: Rational,
    pub residual_valuations: Vec<ExtRational>,
    pub branch: Branch,
}

impl CriticalPoint {
    /// All coordinates at `T = t`, `p` first.
    pub fn eval_at(&self, t: f64) -> Vec<Complex64> {
        self.p.iter().chain(&self.q).map(|x| x.eval_at(t)).collect()
    }
}

/// Times a correction at one level may be re-solved before giving up.
const MAX_ATTEMPTS: u32 = 4;

/// Exponents allowed in the corrections up to `g_max`: differences
/// `g - a` and `g - B` for `g` in the monoid generated by the exponents
/// of `W`, `C` and `(B - C - a)/2`.
pub fn solution_monoid(s: &SuperpotentialData, g_max: Rational) -> Result<GappedMonoid> {
    let base = GappedMonoid::new(s.exponent_generators())?;
    let (a, b) = (s.config.a, s.config.b);
    let mut gens = Vec::new();
    for g in base.enumerate(b + g_max) {
        for lead in [a, b] {
            let d = g - lead;
            if d.is_positive() && d <= g_max {
                gens.push(d);
            }
        }
    }
    GappedMonoid::new(gens)
}

/// Writes `x_j = start_j · exp(X_j)` with `X_j ∈ Λ₊` and solves the
/// normalized equations `T^{-lead_j} x_j ∂_j W = 0` level by level.
pub fn refine_critical_point(
    s: &SuperpotentialData,
    start: &CriticalPoint,
    g_max: Rational,
) -> Result<CriticalPoint> {
    if g_max.is_negative() {
        return Err(Error::Precondition(format!(
            "g_max must be non-negative, got {g_max}"
        )));
    }
    if g_max.is_zero() {
        return Ok(start.clone());
    }
    let k = s.k();
    let n = 2 * k;
    if start.p.len() != k || start.q.len() != k {
        return Err(Error::Precondition(
            "start point has the wrong dimension".into(),
        ));
    }
    let monoid = solution_monoid(s, g_max)?;
    let levels: Vec<Rational> = monoid
        .enumerate(g_max)
        .into_iter()
        .filter(|g| g.is_positive())
        .collect();
    let order = monoid.next_above(g_max).unwrap_or(g_max + g_max);
    let w = s.potential(order + s.config.b)?;
    let rows: Vec<_> = (0..n).map(|j| w.log_derivative(j)).collect();
    let leads: Vec<Rational> = (0..n).map(|j| s.leading_exponent(j)).collect();

    let base: Vec<NovikovScalar> = start.p.iter().chain(&start.q).cloned().collect();
    let z0: Vec<Complex64> = base.iter().map(|x| x.coefficient(Rational::ZERO)).collect();
    if base
        .iter()
        .any(|x| x.valuation() != ExtRational::Finite(Rational::ZERO))
    {
        return Err(Error::Precondition(
            "start coordinates must have valuation zero".into(),
        ));
    }

    let jac = DMatrix::from_fn(n, n, |r, c| {
        rows[r]
            .slice(leads[r])
            .iter()
            .map(|(m, coef)| coef * m[c] as f64 * super::monomial_value(m, &z0))
            .sum::<Complex64>()
    });
    let lu = jac.lu();
    let pivot_ok = (0..n).all(|i| lu.u()[(i, i)].norm() > 1e-12);
    if !lu.is_invertible() || !pivot_ok {
        return Err(Error::SingularSystem(format!(
            " at the leading order (k = {k})"
        )));
    }

    let mut logs = vec![NovikovScalar::zero(); n];
    let mut attempts: BTreeMap<Rational, u32> = BTreeMap::new();
    let point_of = |logs: &[NovikovScalar]| -> Result<Vec<NovikovScalar>> {
        base.iter()
            .zip(logs)
            .map(|(x, l)| Ok((x * &l.exp(order)?).truncate(ExtRational::Finite(order))))
            .collect()
    };
    loop {
        let x = point_of(&logs)?;
        let mut cache = PowerCache::new(&x, order);
        let mut residual = Vec::with_capacity(n);
        let mut lowest: Option<Rational> = None;
        for (row, lead) in rows.iter().zip(&leads) {
            let v = row
                .evaluate_with(&mut cache)?
                .shift(-*lead)
                .truncate(ExtRational::Finite(order));
            let m = row.magnitude_with(&mut cache)?.shift(-*lead);
            if let ExtRational::Finite(e) = significant_valuation(&v, &m) {
                if e <= g_max {
                    lowest = Some(lowest.map_or(e, |l| l.min(e)));
                }
            }
            residual.push(v);
        }
        let Some(level) = lowest else { break };
        if levels.binary_search(&level).is_err() {
            return Err(Error::ResidualRegression { level });
        }
        let count = attempts.entry(level).or_insert(0);
        *count += 1;
        if *count > MAX_ATTEMPTS {
            return Err(Error::ResidualRegression { level });
        }
        let rhs = DVector::from_iterator(n, residual.iter().map(|r| -r.coefficient(level)));
        let delta = lu
            .solve(&rhs)
            .ok_or_else(|| Error::SingularSystem(format!(" at level {level}")))?;
        for (l, d) in logs.iter_mut().zip(delta.iter()) {
            *l = &*l + &NovikovScalar::monomial(*d, level);
        }
    }

    let x = point_of(&logs)?;
    let mut point = CriticalPoint {
        p: x[..k].to_vec(),
        q: x[k..].to_vec(),
        solved_order: g_max,
        residual_valuations: Vec::new(),
        branch: start.branch.clone(),
    };
    point.residual_valuations = point.residual_valuations_for(s, order)?;
    for (v, lead) in point.residual_valuations.iter().zip(&leads) {
        if *v < ExtRational::Finite(*lead + g_max) {
            let level = v.finite().map_or(g_max, |e| e - *lead);
            return Err(Error::ResidualRegression { level });
        }
    }
    Ok(point)
}
