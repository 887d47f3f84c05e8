//! Numerical critical points of `W` at a fixed value of `T`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::laurent::{monomial_value, Monomial};
use super::leading::{leading_solution, Branch};
use super::refine::CriticalPoint;
use super::SuperpotentialData;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Required Euclidean norm of the gradient at a returned point.
pub const ORACLE_GRADIENT_TOL: f64 = 1e-10;

/// `W` with `T` replaced by a number.
#[derive(Clone, Debug)]
pub struct NumericPotential {
    n: usize,
    terms: Vec<(Monomial, Complex64)>,
}

impl NumericPotential {
    pub fn new(s: &SuperpotentialData, t: f64) -> Self {
        NumericPotential {
            n: 2 * s.k(),
            terms: s.numeric_terms(t),
        }
    }

    pub fn value(&self, z: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(m, c)| c * monomial_value(m, z))
            .sum()
    }

    pub fn gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        let mut g = vec![Complex64::new(0.0, 0.0); self.n];
        for (m, c) in &self.terms {
            let v = c * monomial_value(m, z);
            for (j, e) in m.iter().enumerate() {
                if *e != 0 {
                    g[j] += v * *e as f64 / z[j];
                }
            }
        }
        g
    }

    pub fn hessian(&self, z: &[Complex64]) -> DMatrix<Complex64> {
        let mut h = DMatrix::zeros(self.n, self.n);
        for (m, c) in &self.terms {
            let v = c * monomial_value(m, z);
            for (i, ei) in m.iter().enumerate().filter(|(_, e)| **e != 0) {
                for (j, ej) in m.iter().enumerate().filter(|(_, e)| **e != 0) {
                    let factor = *ei as f64 * (*ej as f64 - if i == j { 1.0 } else { 0.0 });
                    h[(i, j)] += v * factor / (z[i] * z[j]);
                }
            }
        }
        h
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Gradient with row `j` multiplied by `z_j t^{-lead_j}`, so all rows are
/// of unit size near the leading solution.
fn scaled_gradient(w: &NumericPotential, z: &[Complex64], scales: &[f64]) -> Vec<Complex64> {
    w.gradient(z)
        .iter()
        .zip(z)
        .zip(scales)
        .map(|((g, x), s)| g * x * *s)
        .collect()
}

/// Damped Newton iteration at a single `t`.
fn newton(w: &NumericPotential, mut z: Vec<Complex64>, scales: &[f64]) -> Result<Vec<Complex64>> {
    let mut r = norm(&scaled_gradient(w, &z, scales));
    for _ in 0..100 {
        if r < 1e-14 {
            break;
        }
        let g = DVector::from_vec(w.gradient(&z));
        let step = w
            .hessian(&z)
            .lu()
            .solve(&(-g))
            .ok_or_else(|| Error::NewtonDivergence("singular Hessian".into()))?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<Complex64> = z
                .iter()
                .zip(step.iter())
                .map(|(x, d)| x + d * lambda)
                .collect();
            let rt = norm(&scaled_gradient(w, &trial, scales));
            if rt.is_finite() && rt < r {
                z = trial;
                r = rt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(z)
}

/// Critical point of `W` at `T = t` on the default leading branch.
pub fn solve_numeric_oracle(s: &SuperpotentialData, t: f64) -> Result<Vec<Complex64>> {
    let start = leading_solution(&s.config, &s.signs, &Branch::default())?;
    solve_numeric_oracle_from(s, &start, t)
}

/// Critical point of `W` at `T = t`, found by continuation in `log t`
/// from the leading solution `start` at a tiny value of `T`.
pub fn solve_numeric_oracle_from(
    s: &SuperpotentialData,
    start: &CriticalPoint,
    t: f64,
) -> Result<Vec<Complex64>> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Precondition(format!(
            "t must lie in (0, 1), got {t}"
        )));
    }
    let n = 2 * s.k();
    let leads: Vec<f64> = (0..n).map(|j| s.leading_exponent(j).to_f64()).collect();
    let mut z: Vec<Complex64> = start
        .p
        .iter()
        .chain(&start.q)
        .map(|x| x.coefficient(Rational::ZERO))
        .collect();
    let log_target = t.log10();
    let log_start = log_target.min(-12.0);
    let steps = ((log_target - log_start) / 0.25).ceil().max(0.0) as usize;
    for i in 0..=steps {
        let lt = if steps == 0 {
            log_target
        } else {
            log_start + (log_target - log_start) * i as f64 / steps as f64
        };
        let ti = 10f64.powf(lt);
        let scales: Vec<f64> = leads.iter().map(|l| ti.powf(-l)).collect();
        z = newton(&NumericPotential::new(s, ti), z, &scales)?;
    }
    let g = norm(&NumericPotential::new(s, t).gradient(&z));
    if g.is_nan() || g >= ORACLE_GRADIENT_TOL {
        return Err(Error::NewtonDivergence(format!(
            "gradient norm {g:e} at t = {t}"
        )));
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configuration::LinkConfig;
    use crate::novikov::NovikovScalar;
    use crate::rational::q;
    use crate::superpotential::build_superpotential;

    #[test]
    fn converges_and_approaches_leading_solution() {
        let c = LinkConfig::new(2, q(2, 5), q(1, 10)).unwrap();
        let s = build_superpotential(&c, &[1], NovikovScalar::zero()).unwrap();
        let start = leading_solution(&c, &[1], &Branch::default()).unwrap();
        let z0: Vec<Complex64> = start.eval_at(1.0);
        let mut errs = Vec::new();
        for t in [1e-2, 1e-3, 1e-4] {
            let z = solve_numeric_oracle_from(&s, &start, t).unwrap();
            assert!(norm(&NumericPotential::new(&s, t).gradient(&z)) < ORACLE_GRADIENT_TOL);
            errs.push(
                z.iter()
                    .zip(&z0)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max),
            );
        }
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    }

    #[test]
    fn palindromic_signs_give_symmetric_points() {
        for (k, b, a, signs) in [
            (3u32, q(3, 10), q(1, 20), vec![1i8, 1]),
            (3, q(3, 10), q(1, 20), vec![-1, -1]),
            (4, q(1, 4), q(1, 30), vec![1, -1, 1]),
        ] {
            let c = LinkConfig::new(k, b, a).unwrap();
            let s = build_superpotential(&c, &signs, NovikovScalar::zero()).unwrap();
            let z = solve_numeric_oracle(&s, 1e-2).unwrap();
            let k = k as usize;
            for i in 0..k {
                let j = k - 1 - i;
                assert!((z[i] * z[j] - 1.0).norm() < 1e-9, "p symmetry at {i}");
                assert!(
                    (z[k + i] * z[k + j] - 1.0).norm() < 1e-9,
                    "q symmetry at {i}"
                );
            }
        }
    }

    #[test]
    fn rejects_bad_t() {
        let c = LinkConfig::new(2, q(2, 5), q(1, 10)).unwrap();
        let s = build_superpotential(&c, &[1], NovikovScalar::zero()).unwrap();
        assert!(solve_numeric_oracle(&s, 1.5).is_err());
    }
}
