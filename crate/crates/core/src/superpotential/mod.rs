//! The bulk-deformed superpotential of a link configuration and its
//! critical points.

mod cartan;
mod laurent;
mod leading;
mod nonresonance;
mod oracle;
mod refine;

pub use cartan::{
    block_matrix_determinant, cartan_eigenvalues, cartan_eigenvalues_numeric, cartan_matrix,
    negated_cartan_spectrum,
};
pub use laurent::{monomial_value, significant_valuation, LaurentPoly, Monomial, PowerCache};
pub use leading::{
    leading_order_solved, leading_residuals, leading_solution, orbifold_coefficients,
    recursion_constants, recursion_products, sign_closed_form, sign_recursion_constants, Branch,
};
pub use nonresonance::{
    check_nonresonance, nonresonance_report, NonresonanceMethod, NonresonanceReport, RELATION_TOL,
};
pub use oracle::{
    solve_numeric_oracle, solve_numeric_oracle_from, NumericPotential, ORACLE_GRADIENT_TOL,
};
pub use refine::{refine_critical_point, solution_monoid, CriticalPoint};

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::configuration::LinkConfig;
use crate::error::{Error, Result};
use crate::novikov::NovikovScalar;
use crate::rational::{q, ExtRational, Rational};

/// Relative precision used for `e^β` in the stored potential.
pub const DEFAULT_EXP_PRECISION: Rational = Rational::ONE;

/// `√2·T^{(B-C-a)/2}`, the solution of `(x²/2)·T^{C+a} = T^B`.
pub fn beta_orb_for(b: Rational, c: Rational, a: Rational) -> Result<NovikovScalar> {
    let e = (b - c - a) / Rational::from_int(2);
    if !e.is_positive() {
        return Err(Error::OrbifoldNormalization(e));
    }
    Ok(NovikovScalar::monomial(Complex64::new(2f64.sqrt(), 0.0), e))
}

/// Orbifold normalization for a configuration (`C = 0` when `k = 1`).
pub fn beta_orb(c: &LinkConfig) -> Result<NovikovScalar> {
    beta_orb_for(c.b, c.c_or_zero(), c.a)
}

/// Signs `ε_0..ε_{k-2}` validated to lie in `{±1}`.
pub fn validate_signs(k: u32, signs: &[i8]) -> Result<()> {
    let need = k.saturating_sub(1) as usize;
    if signs.len() != need {
        return Err(Error::InvalidConfig(format!(
            "expected {need} signs, got {}",
            signs.len()
        )));
    }
    if let Some(s) = signs.iter().find(|s| s.abs() != 1) {
        return Err(Error::InvalidConfig(format!("signs must be ±1, got {s}")));
    }
    Ok(())
}

/// Every sign vector of length `k - 1`, in lexicographic order with `+1` first.
pub fn all_sign_vectors(k: u32) -> Vec<Vec<i8>> {
    let n = k.saturating_sub(1);
    (0..1u32 << n)
        .map(|mask| {
            (0..n)
                .map(|i| if mask >> i & 1 == 0 { 1 } else { -1 })
                .collect()
        })
        .collect()
}

/// A potential together with the data it was built from.
#[derive(Clone, Debug, Serialize)]
pub struct SuperpotentialData {
    pub config: LinkConfig,
    pub signs: Vec<i8>,
    pub beta: NovikovScalar,
    pub beta_orb: NovikovScalar,
    #[serde(rename = "W")]
    pub w: LaurentPoly,
    #[serde(rename = "W_hot")]
    pub w_hot: LaurentPoly,
    #[serde(skip)]
    q_part: LaurentPoly,
    #[serde(skip)]
    p_part: LaurentPoly,
    #[serde(skip)]
    orb_part: LaurentPoly,
}

/// `W = T^a Σ (q_i + q_i⁻¹) + e^β Σ (T^{n(i)C+B} p_i + T^{s(i)C+B} p_i⁻¹)
///    + T^B Σ ε_i p_{i+1}⁻¹ p_i (q_{i+1} + q_i⁻¹)`.
pub fn build_superpotential(
    config: &LinkConfig,
    signs: &[i8],
    beta: NovikovScalar,
) -> Result<SuperpotentialData> {
    validate_signs(config.k, signs)?;
    if let ExtRational::Finite(v) = beta.valuation() {
        if !v.is_positive() {
            return Err(Error::InvalidConfig(format!(
                "β must have positive valuation, got {v}"
            )));
        }
    }
    let k = config.k as usize;
    let c = config.c_or_zero();
    let t = |e: Rational| NovikovScalar::monomial(Complex64::new(1.0, 0.0), e);

    let mut q_part = LaurentPoly::zero(k);
    for i in 0..k {
        q_part = q_part.add(
            &LaurentPoly::q(k, i, 1)
                .add(&LaurentPoly::q(k, i, -1))
                .scale(&t(config.a)),
        );
    }
    let mut p_part = LaurentPoly::zero(k);
    for i in 0..k {
        let n = Rational::from_int((k - 1 - i) as i64);
        let s = Rational::from_int(i as i64);
        p_part = p_part
            .add(&LaurentPoly::p(k, i, 1).scale(&t(n * c + config.b)))
            .add(&LaurentPoly::p(k, i, -1).scale(&t(s * c + config.b)));
    }
    let mut orb_part = LaurentPoly::zero(k);
    for (i, &eps) in signs.iter().enumerate() {
        let ratio = LaurentPoly::p(k, i + 1, -1).mul(&LaurentPoly::p(k, i, 1));
        let qs = LaurentPoly::q(k, i + 1, 1).add(&LaurentPoly::q(k, i, -1));
        let coeff = NovikovScalar::monomial(Complex64::new(eps as f64, 0.0), config.b);
        orb_part = orb_part.add(&ratio.mul(&qs).scale(&coeff));
    }
    let mut data = SuperpotentialData {
        config: config.clone(),
        signs: signs.to_vec(),
        beta,
        beta_orb: beta_orb(config)?,
        w: LaurentPoly::zero(k),
        w_hot: LaurentPoly::zero(k),
        q_part,
        p_part,
        orb_part,
    };
    data.w = data.potential(DEFAULT_EXP_PRECISION)?;
    Ok(data)
}

impl SuperpotentialData {
    pub fn k(&self) -> usize {
        self.config.k as usize
    }

    /// Adds higher-order orbifold terms; every coefficient must have
    /// valuation above `B` so that the leading equations are untouched.
    pub fn with_hot(mut self, w_hot: LaurentPoly) -> Result<Self> {
        if w_hot.k() != self.k() {
            return Err(Error::InvalidConfig(
                "W_hot has the wrong number of variables".into(),
            ));
        }
        for (_, c) in w_hot.terms() {
            if c.valuation() <= ExtRational::Finite(self.config.b) {
                return Err(Error::InvalidConfig(format!(
                    "W_hot coefficient {c} must have valuation above B = {}",
                    self.config.b
                )));
            }
        }
        self.w_hot = w_hot;
        self.w = self.potential(DEFAULT_EXP_PRECISION)?;
        Ok(self)
    }

    /// The potential with `e^β` expanded modulo `T^{precision}`.
    pub fn potential(&self, precision: Rational) -> Result<LaurentPoly> {
        let e_beta = self.beta.exp(precision)?;
        Ok(self
            .q_part
            .add(&self.p_part.scale(&e_beta))
            .add(&self.orb_part)
            .add(&self.w_hot))
    }

    pub fn smooth_part(&self) -> Result<LaurentPoly> {
        let e_beta = self.beta.exp(DEFAULT_EXP_PRECISION)?;
        Ok(self.q_part.add(&self.p_part.scale(&e_beta)))
    }

    pub fn orbifold_part(&self) -> &LaurentPoly {
        &self.orb_part
    }

    /// Exponent of the equation for variable `j` (`B` for `p_i`, `a` for `q_i`).
    pub fn leading_exponent(&self, j: usize) -> Rational {
        if j < self.k() {
            self.config.b
        } else {
            self.config.a
        }
    }

    /// Exponents generating the possible coefficient exponents of `W`.
    pub fn exponent_generators(&self) -> Vec<Rational> {
        let mut gens = vec![self.config.a, self.config.b];
        if let Some(c) = self.config.c {
            gens.push(c);
        }
        gens.push(
            (self.config.b - self.config.c_or_zero() - self.config.a) / Rational::from_int(2),
        );
        gens.extend(self.beta.terms().iter().map(|(e, _)| *e));
        for (_, c) in self.w_hot.terms() {
            gens.extend(c.terms().iter().map(|(e, _)| *e));
        }
        gens.retain(|g| g.is_positive());
        gens.sort();
        gens.dedup();
        gens
    }

    /// Coefficients of `W` at `T = t`, using the exact value of `e^{β(t)}`.
    pub fn numeric_terms(&self, t: f64) -> Vec<(Monomial, Complex64)> {
        let e_beta = self.beta.eval_at(t).exp();
        let mut acc: BTreeMap<Monomial, Complex64> = BTreeMap::new();
        let parts = [
            (&self.q_part, Complex64::new(1.0, 0.0)),
            (&self.p_part, e_beta),
            (&self.orb_part, Complex64::new(1.0, 0.0)),
            (&self.w_hot, Complex64::new(1.0, 0.0)),
        ];
        for (poly, factor) in parts {
            for (m, c) in poly.at(t) {
                *acc.entry(m).or_default() += c * factor;
            }
        }
        acc.into_iter().collect()
    }
}

/// `∂W/∂x_j` for every variable, `p` first.
pub fn grad(w: &LaurentPoly) -> Vec<LaurentPoly> {
    w.grad()
}

/// Convenience constructor for the configuration used in many examples.
pub fn example_config() -> LinkConfig {
    LinkConfig::new(2, q(2, 5), q(1, 10)).expect("valid example configuration")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tm(e: Rational) -> NovikovScalar {
        NovikovScalar::monomial(Complex64::new(1.0, 0.0), e)
    }

    #[test]
    fn beta_orb_normalization() {
        let b = beta_orb_for(q(2, 5), q(1, 5), q(1, 10)).unwrap();
        assert_eq!(b.leading().unwrap().0, q(1, 20));
        let lhs = (&(&b * &b) * &tm(q(3, 10))).scale(Complex64::new(0.5, 0.0));
        assert!(lhs.eq_mod(&tm(q(2, 5)), q(10, 1), 1e-12));
        assert_eq!(
            beta_orb_for(q(2, 5), q(1, 5), q(1, 5)),
            Err(Error::OrbifoldNormalization(Rational::ZERO))
        );
    }

    #[test]
    fn two_circle_potential_matches_hand_expansion() {
        let s = build_superpotential(&example_config(), &[1], NovikovScalar::zero()).unwrap();
        let k = 2;
        let qs = LaurentPoly::q(k, 0, 1)
            .add(&LaurentPoly::q(k, 0, -1))
            .add(&LaurentPoly::q(k, 1, 1))
            .add(&LaurentPoly::q(k, 1, -1))
            .scale(&tm(q(1, 10)));
        let ps = LaurentPoly::p(k, 0, 1)
            .scale(&tm(q(3, 5)))
            .add(&LaurentPoly::p(k, 0, -1).scale(&tm(q(2, 5))))
            .add(&LaurentPoly::p(k, 1, 1).scale(&tm(q(2, 5))))
            .add(&LaurentPoly::p(k, 1, -1).scale(&tm(q(3, 5))));
        let orb = LaurentPoly::p(k, 1, -1)
            .mul(&LaurentPoly::p(k, 0, 1))
            .mul(&LaurentPoly::q(k, 1, 1).add(&LaurentPoly::q(k, 0, -1)))
            .scale(&tm(q(2, 5)));
        assert_eq!(s.w, qs.add(&ps).add(&orb));
    }

    #[test]
    fn beta_multiplies_only_p_terms() {
        let beta = NovikovScalar::monomial(Complex64::new(0.5, 0.0), q(1, 7));
        let s0 = build_superpotential(&example_config(), &[1], NovikovScalar::zero()).unwrap();
        let s1 = build_superpotential(&example_config(), &[1], beta.clone()).unwrap();
        let e = beta.exp(DEFAULT_EXP_PRECISION).unwrap();
        for (m, c) in s1.w.terms() {
            let c0 = s0.w.terms().find(|(m0, _)| *m0 == m).unwrap().1;
            let touches_p = m[..2].iter().any(|x| *x != 0);
            let touches_q = m[2..].iter().any(|x| *x != 0);
            if touches_p && !touches_q {
                assert!(c.eq_mod(&(c0 * &e), q(2, 1), 1e-12));
            } else {
                assert_eq!(c, c0);
            }
        }
    }

    #[test]
    fn single_circle_has_no_orbifold_terms() {
        let c = LinkConfig::new(1, q(1, 2), q(1, 10)).unwrap();
        let s = build_superpotential(&c, &[], NovikovScalar::zero()).unwrap();
        assert!(s.orbifold_part().is_empty());
        assert_eq!(s.w.len(), 4);
    }

    #[test]
    fn rejects_bad_signs_and_beta() {
        let c = example_config();
        assert!(build_superpotential(&c, &[], NovikovScalar::zero()).is_err());
        assert!(build_superpotential(&c, &[2], NovikovScalar::zero()).is_err());
        assert!(build_superpotential(&c, &[1], NovikovScalar::real(1.0)).is_err());
    }

    #[test]
    fn grad_of_q_terms() {
        let s = build_superpotential(&example_config(), &[1], NovikovScalar::zero()).unwrap();
        let g = grad(&s.w);
        assert_eq!(g.len(), 4);
        // ∂_{q0} W = T^a(1 - q0^{-2}) + T^B ε0 p1^{-1} p0 (-q0^{-2})
        let expected = LaurentPoly::q(2, 0, 0)
            .add(&LaurentPoly::q(2, 0, -2).scale(&NovikovScalar::real(-1.0)))
            .scale(&tm(q(1, 10)))
            .add(
                &LaurentPoly::p(2, 1, -1)
                    .mul(&LaurentPoly::p(2, 0, 1))
                    .mul(&LaurentPoly::q(2, 0, -2))
                    .scale(&tm(q(2, 5)).scale(Complex64::new(-1.0, 0.0))),
            );
        assert_eq!(g[2], expected);
    }

    #[test]
    fn sign_vectors_are_enumerated() {
        assert_eq!(all_sign_vectors(1), vec![Vec::<i8>::new()]);
        assert_eq!(all_sign_vectors(3).len(), 4);
        assert_eq!(all_sign_vectors(3)[0], vec![1, 1]);
    }
}
