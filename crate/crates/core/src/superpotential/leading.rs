//! The leading-order critical point.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::laurent::{significant_valuation, PowerCache};
use super::refine::CriticalPoint;
use super::{build_superpotential, validate_signs, SuperpotentialData};
use crate::configuration::LinkConfig;
use crate::error::{Error, Result};
use crate::novikov::{NovikovScalar, ZERO_TOL};
use crate::rational::{ExtRational, Rational};

/// Choice among the leading solutions: which `(k+1)`-th root and the
/// common value `q_i = ±1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    /// Index `m` of the root `|w|^{1/(k+1)} e^{i(arg w + 2πm)/(k+1)}`;
    /// `None` picks a real root when there is one, else `m = 0`.
    pub root_index: Option<usize>,
    pub q_sign: i8,
}

impl Default for Branch {
    fn default() -> Self {
        Branch {
            root_index: None,
            q_sign: 1,
        }
    }
}

/// All `k + 1` roots of `w`, indexed by `m`.
fn roots(w: Complex64, n: usize) -> Vec<Complex64> {
    let (r, theta) = w.to_polar();
    (0..n)
        .map(|m| {
            Complex64::from_polar(
                r.powf(1.0 / n as f64),
                (theta + 2.0 * PI * m as f64) / n as f64,
            )
        })
        .collect()
}

fn default_root(w: Complex64, n: usize) -> usize {
    if w.im == 0.0 && w.re < 0.0 && n % 2 == 1 {
        n / 2
    } else {
        0
    }
}

fn pick_root(w: Complex64, n: usize, index: Option<usize>) -> Result<(usize, Complex64)> {
    let all = roots(w, n);
    let m = index.unwrap_or_else(|| default_root(w, n));
    let mut z = *all
        .get(m)
        .ok_or_else(|| Error::InvalidConfig(format!("root index {m} out of range 0..{n}")))?;
    if z.im.abs() < 1e-15 * z.norm() {
        z.im = 0.0;
    }
    Ok((m, z))
}

/// `c_i = ε_i (q_{i+1} + q_i⁻¹)` at `q ≡ s`.
pub fn orbifold_coefficients(signs: &[i8], q_sign: i8) -> Vec<f64> {
    signs
        .iter()
        .map(|&e| e as f64 * 2.0 * q_sign as f64)
        .collect()
}

/// Leading critical point: `q_i = s` and
/// `p_i = (c_0⋯c_{i-1}) x^{i+1}` with `x^{k+1} = 1/(c_0⋯c_{k-2})`.
pub fn leading_solution(
    config: &LinkConfig,
    signs: &[i8],
    branch: &Branch,
) -> Result<CriticalPoint> {
    validate_signs(config.k, signs)?;
    if branch.q_sign.abs() != 1 {
        return Err(Error::InvalidConfig(format!(
            "q sign must be ±1, got {}",
            branch.q_sign
        )));
    }
    let k = config.k as usize;
    let c = orbifold_coefficients(signs, branch.q_sign);
    let target = Complex64::new(1.0 / c.iter().product::<f64>(), 0.0);
    let (m, x) = pick_root(target, k + 1, branch.root_index)?;
    let mut prefix = 1.0;
    let mut p = Vec::with_capacity(k);
    for i in 0..k {
        p.push(x.powi(i as i32 + 1) * prefix);
        if i < c.len() {
            prefix *= c[i];
        }
    }
    let s = build_superpotential(config, signs, NovikovScalar::zero())?;
    let resolved = Branch {
        root_index: Some(m),
        q_sign: branch.q_sign,
    };
    let mut point = CriticalPoint {
        p: p.into_iter().map(NovikovScalar::constant).collect(),
        q: vec![NovikovScalar::real(branch.q_sign as f64); k],
        solved_order: Rational::ZERO,
        residual_valuations: Vec::new(),
        branch: resolved,
    };
    point.residual_valuations = point.residual_valuations_for(&s, Rational::ONE)?;
    Ok(point)
}

/// Coefficient of `T^{lead}` in each component of `grad W` at the
/// constant parts of the point.
pub fn leading_residuals(s: &SuperpotentialData, point: &CriticalPoint) -> Vec<Complex64> {
    let z: Vec<Complex64> = point
        .p
        .iter()
        .chain(&point.q)
        .map(|x| x.coefficient(Rational::ZERO))
        .collect();
    s.w.grad()
        .iter()
        .enumerate()
        .map(|(j, g)| {
            g.slice(s.leading_exponent(j))
                .iter()
                .map(|(m, c)| c * super::monomial_value(m, &z))
                .sum()
        })
        .collect()
}

/// True when every leading residual vanishes to within the series tolerance.
pub fn leading_order_solved(s: &SuperpotentialData, point: &CriticalPoint) -> bool {
    leading_residuals(s, point)
        .iter()
        .all(|r| r.norm() <= ZERO_TOL)
}

/// `σ_i` with `p_{i-1}⁻¹ p_i² p_{i+1}⁻¹ = σ_i` (`p_{-1} = p_k = 1`).
pub fn recursion_constants(signs: &[i8], q_sign: i8) -> Vec<f64> {
    let c = orbifold_coefficients(signs, q_sign);
    let k = signs.len() + 1;
    if k == 1 {
        return vec![1.0];
    }
    (0..k)
        .map(|i| match i {
            0 => 1.0 / c[0],
            _ if i == k - 1 => c[k - 2],
            _ => c[i - 1] / c[i],
        })
        .collect()
}

/// `p_{i-1}⁻¹ p_i² p_{i+1}⁻¹` for each `i`.
pub fn recursion_products(p: &[Complex64]) -> Vec<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    (0..p.len())
        .map(|i| {
            let prev = if i == 0 { one } else { p[i - 1] };
            let next = p.get(i + 1).copied().unwrap_or(one);
            p[i] * p[i] / (prev * next)
        })
        .collect()
}

/// `ξ_i = τ_{i-1} ζ^{i+1}` with `τ_j = ε_0⋯ε_j` and `ζ^{k+1} = τ_{k-2}`.
///
/// This sign-only form solves the recursion with constants
/// [`sign_recursion_constants`]; it differs from [`leading_solution`]
/// by the factor `2^{(2i+1-k)/(k+1)}` coming from `q_{i+1} + q_i⁻¹ = 2`.
pub fn sign_closed_form(
    k: usize,
    signs: &[i8],
    root_index: Option<usize>,
) -> Result<Vec<Complex64>> {
    validate_signs(k as u32, signs)?;
    let tau: Vec<f64> = signs
        .iter()
        .scan(1.0, |acc, &e| {
            *acc *= e as f64;
            Some(*acc)
        })
        .collect();
    let tau_at = |j: isize| if j < 0 { 1.0 } else { tau[j as usize] };
    let (_, zeta) = pick_root(
        Complex64::new(tau_at(k as isize - 2), 0.0),
        k + 1,
        root_index,
    )?;
    Ok((0..k)
        .map(|i| zeta.powi(i as i32 + 1) * tau_at(i as isize - 1))
        .collect())
}

/// `σ_0 = ε_0`, `σ_i = ε_{i-1}ε_i`, `σ_{k-1} = ε_{k-2}`.
pub fn sign_recursion_constants(signs: &[i8]) -> Vec<f64> {
    let k = signs.len() + 1;
    if k == 1 {
        return vec![1.0];
    }
    let e = |i: usize| signs[i] as f64;
    (0..k)
        .map(|i| match i {
            0 => e(0),
            _ if i == k - 1 => e(k - 2),
            _ => e(i - 1) * e(i),
        })
        .collect()
}

impl CriticalPoint {
    /// Valuations of `grad W` at this point, computed modulo
    /// `T^{lead + rel_order}` for each component; coefficients at the level
    /// of rounding noise count as zero.
    pub fn residual_valuations_for(
        &self,
        s: &SuperpotentialData,
        rel_order: Rational,
    ) -> Result<Vec<ExtRational>> {
        let w = s.potential(rel_order + s.config.b)?;
        let values: Vec<NovikovScalar> = self.p.iter().chain(&self.q).cloned().collect();
        let mut cache = PowerCache::new(&values, rel_order);
        w.grad()
            .iter()
            .map(|g| {
                let v = g.evaluate_with(&mut cache)?;
                let m = g.magnitude_with(&mut cache)?;
                Ok(significant_valuation(&v, &m).min(v.order()))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::superpotential::all_sign_vectors;

    /// `B = 2/(k+3)` so that `C = B/2`.
    fn cfg(k: u32) -> LinkConfig {
        let d = k as i64 + 3;
        LinkConfig::new(k, q(2, d), q(1, 2 * d)).unwrap()
    }

    #[test]
    fn leading_residuals_vanish_for_all_signs() {
        for k in 1..=6u32 {
            let c = cfg(k);
            for signs in all_sign_vectors(k) {
                let pt = leading_solution(&c, &signs, &Branch::default()).unwrap();
                let s = build_superpotential(&c, &signs, NovikovScalar::zero()).unwrap();
                assert!(leading_order_solved(&s, &pt), "k={k} signs={signs:?}");
                let p: Vec<Complex64> =
                    pt.p.iter().map(|x| x.coefficient(Rational::ZERO)).collect();
                let lhs = recursion_products(&p);
                let rhs = recursion_constants(&signs, 1);
                for (x, y) in lhs.iter().zip(&rhs) {
                    assert!((x - y).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn two_circle_values() {
        let c = LinkConfig::new(2, q(2, 5), q(1, 10)).unwrap();
        let pt = leading_solution(&c, &[1], &Branch::default()).unwrap();
        let p: Vec<Complex64> = pt.p.iter().map(|x| x.coefficient(Rational::ZERO)).collect();
        let cube = 2f64.powf(1.0 / 3.0);
        assert!((p[0] - 1.0 / cube).norm() < 1e-14 && (p[1] - cube).norm() < 1e-14);
        assert!((recursion_products(&p)[0] - 0.5).norm() < 1e-14);
        let neg = leading_solution(&c, &[-1], &Branch::default()).unwrap();
        let p: Vec<Complex64> = neg
            .p
            .iter()
            .map(|x| x.coefficient(Rational::ZERO))
            .collect();
        assert!((p[0] + 1.0 / cube).norm() < 1e-14 && (p[1] + cube).norm() < 1e-14);
    }

    #[test]
    fn sign_only_form_solves_sign_recursion_but_not_the_potential() {
        for k in 1..=6usize {
            for signs in all_sign_vectors(k as u32) {
                let xi = sign_closed_form(k, &signs, None).unwrap();
                for (x, y) in recursion_products(&xi)
                    .iter()
                    .zip(sign_recursion_constants(&signs))
                {
                    assert!((x - y).norm() < 1e-12);
                }
                let pt = leading_solution(&cfg(k as u32), &signs, &Branch::default()).unwrap();
                for (i, (x, p)) in xi.iter().zip(&pt.p).enumerate() {
                    let factor = 2f64.powf((2.0 * i as f64 + 1.0 - k as f64) / (k as f64 + 1.0));
                    assert!((x * factor - p.coefficient(Rational::ZERO)).norm() < 1e-12);
                }
            }
        }
        let c = LinkConfig::new(2, q(2, 5), q(1, 10)).unwrap();
        let s = build_superpotential(&c, &[1], NovikovScalar::zero()).unwrap();
        let xi = sign_closed_form(2, &[1], None).unwrap();
        let mut pt = leading_solution(&c, &[1], &Branch::default()).unwrap();
        pt.p = xi.into_iter().map(NovikovScalar::constant).collect();
        assert!(!leading_order_solved(&s, &pt));
    }

    #[test]
    fn every_branch_solves_leading_order() {
        let c = LinkConfig::new(3, q(3, 10), q(1, 20)).unwrap();
        for signs in all_sign_vectors(3) {
            let s = build_superpotential(&c, &signs, NovikovScalar::zero()).unwrap();
            for m in 0..4 {
                for qs in [1, -1] {
                    let pt = leading_solution(
                        &c,
                        &signs,
                        &Branch {
                            root_index: Some(m),
                            q_sign: qs,
                        },
                    )
                    .unwrap();
                    assert!(leading_order_solved(&s, &pt));
                }
            }
        }
        assert!(leading_solution(
            &c,
            &[1, 1],
            &Branch {
                root_index: Some(4),
                q_sign: 1
            }
        )
        .is_err());
    }
}
