//! Non-resonance of two lists of positive reals: an ordering condition on
//! ratios plus the absence of small integer relations.

use serde::Serialize;

/// Two integer combinations closer than this count as a relation.
pub const RELATION_TOL: f64 = 1e-9;

/// Largest number of left-hand combinations enumerated exhaustively.
const EXHAUSTIVE_LIMIT: u64 = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NonresonanceMethod {
    Exhaustive,
    Lattice,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonresonanceReport {
    pub ratio_condition: bool,
    /// First violating pair `(i, j)` of the ratio condition.
    pub ratio_violation: Option<(usize, usize)>,
    /// A relation `Σ α_i r_i = Σ β_i ρ_i`, as `(α, β)`.
    pub relation: Option<(Vec<i64>, Vec<i64>)>,
    pub method: NonresonanceMethod,
    pub nonresonant: bool,
}

/// True iff `r_i/r_j < ρ_i/ρ_j` for all `i < j` and no nonzero `(α, β)`
/// with entries bounded by `coeff_bound` satisfies `α·r = β·ρ`.
pub fn check_nonresonance(r: &[f64], rho: &[f64], coeff_bound: i64) -> bool {
    nonresonance_report(r, rho, coeff_bound).nonresonant
}

pub fn nonresonance_report(r: &[f64], rho: &[f64], coeff_bound: i64) -> NonresonanceReport {
    assert_eq!(r.len(), rho.len(), "r and rho must have the same length");
    assert!(coeff_bound >= 1, "coefficient bound must be positive");
    assert!(
        r.iter().chain(rho).all(|x| *x > 0.0 && x.is_finite()),
        "entries must be positive"
    );
    let k = r.len();
    let ratio_violation = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .find(|&(i, j)| r[i] / r[j] >= rho[i] / rho[j]);
    let side = (2 * coeff_bound as u64 + 1).checked_pow(k as u32);
    let exhaustive = k <= 3 && side.is_some_and(|s| s <= EXHAUSTIVE_LIMIT);
    let (relation, method) = if exhaustive {
        (
            exhaustive_relation(r, rho, coeff_bound),
            NonresonanceMethod::Exhaustive,
        )
    } else {
        (
            lattice_relation(r, rho, coeff_bound),
            NonresonanceMethod::Lattice,
        )
    };
    NonresonanceReport {
        ratio_condition: ratio_violation.is_none(),
        ratio_violation,
        nonresonant: ratio_violation.is_none() && relation.is_none(),
        relation,
        method,
    }
}

/// Mixed-radix decoding of `idx` into `k` digits in `[-b, b]`.
fn decode(mut idx: u64, k: usize, b: i64) -> Vec<i64> {
    let base = (2 * b + 1) as u64;
    (0..k)
        .map(|_| {
            let d = (idx % base) as i64 - b;
            idx /= base;
            d
        })
        .collect()
}

fn dot(c: &[i64], x: &[f64]) -> f64 {
    c.iter().zip(x).map(|(a, b)| *a as f64 * b).sum()
}

/// Meet in the middle: sort all `β·ρ`, then look up every `α·r`.
fn exhaustive_relation(r: &[f64], rho: &[f64], b: i64) -> Option<(Vec<i64>, Vec<i64>)> {
    let k = r.len();
    let count = (2 * b as u64 + 1).pow(k as u32);
    let zero_index = decode_inverse_zero(k, b);
    let mut right: Vec<(f64, u64)> = (0..count)
        .map(|i| (dot(&decode(i, k, b), rho), i))
        .collect();
    right.sort_by(|x, y| x.0.total_cmp(&y.0));
    for li in 0..count {
        let alpha = decode(li, k, b);
        let v = dot(&alpha, r);
        let start = right.partition_point(|(x, _)| *x < v - RELATION_TOL);
        for &(x, ri) in right[start..]
            .iter()
            .take_while(|(x, _)| *x <= v + RELATION_TOL)
        {
            if li == zero_index && ri == zero_index {
                continue;
            }
            debug_assert!((x - v).abs() <= RELATION_TOL);
            return Some((alpha, decode(ri, k, b)));
        }
    }
    None
}

/// Index whose decoding is the zero vector.
fn decode_inverse_zero(k: usize, b: i64) -> u64 {
    let base = (2 * b + 1) as u64;
    (0..k).fold(0, |acc, _| acc * base + b as u64)
}

/// Integer-relation search on `(r, -ρ)` by LLL reduction of the lattice
/// spanned by `(e_i, N x_i)`; inspects the reduced basis only.
fn lattice_relation(r: &[f64], rho: &[f64], b: i64) -> Option<(Vec<i64>, Vec<i64>)> {
    let x: Vec<f64> = r.iter().copied().chain(rho.iter().map(|v| -v)).collect();
    let n = x.len();
    let scale = 1.0 / RELATION_TOL;
    let mut basis: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = vec![0.0; n + 1];
            row[i] = 1.0;
            row[n] = (scale * x[i]).round();
            row
        })
        .collect();
    lll_reduce(&mut basis, 0.75);
    basis.iter().find_map(|row| {
        let c: Vec<i64> = row[..n].iter().map(|v| v.round() as i64).collect();
        let nonzero = c.iter().any(|v| *v != 0);
        let bounded = c.iter().all(|v| v.abs() <= b);
        (nonzero && bounded && dot(&c, &x).abs() <= RELATION_TOL)
            .then(|| (c[..r.len()].to_vec(), c[r.len()..].to_vec()))
    })
}

fn inner(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Textbook LLL with Gram–Schmidt recomputed after each change.
fn lll_reduce(basis: &mut [Vec<f64>], delta: f64) {
    let n = basis.len();
    let gram_schmidt = |basis: &[Vec<f64>]| {
        let mut star: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut mu = vec![vec![0.0; n]; n];
        for i in 0..n {
            let mut v = basis[i].clone();
            for j in 0..i {
                mu[i][j] = inner(&basis[i], &star[j]) / inner(&star[j], &star[j]);
                for (vi, sj) in v.iter_mut().zip(&star[j]) {
                    *vi -= mu[i][j] * sj;
                }
            }
            star.push(v);
        }
        (star, mu)
    };
    let (mut star, mut mu) = gram_schmidt(basis);
    let mut k = 1;
    let mut guard = 0;
    while k < n && guard < 100_000 {
        guard += 1;
        for j in (0..k).rev() {
            let m = mu[k][j].round();
            if m != 0.0 {
                let bj = basis[j].clone();
                for (x, y) in basis[k].iter_mut().zip(&bj) {
                    *x -= m * y;
                }
                (star, mu) = gram_schmidt(basis);
            }
        }
        let lhs = inner(&star[k], &star[k]);
        let rhs = (delta - mu[k][k - 1] * mu[k][k - 1]) * inner(&star[k - 1], &star[k - 1]);
        if lhs >= rhs {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            (star, mu) = gram_schmidt(basis);
            k = (k - 1).max(1);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_inputs_are_resonant() {
        let rep = nonresonance_report(&[1.0, 2.0], &[1.0, 3.0], 5);
        assert!(rep.relation.is_some());
        assert!(!rep.nonresonant);
        let rep = nonresonance_report(&[1.0, 2.0], &[2.0, 3.0], 5);
        assert!(rep.ratio_condition && rep.relation.is_some() && !rep.nonresonant);
    }

    #[test]
    fn shared_entry_is_a_relation() {
        // r_0 = ρ_0 = 1 gives α = β = (1, 0)
        let rep = nonresonance_report(&[1.0, 2f64.sqrt()], &[1.0, 3f64.sqrt()], 100);
        assert!(!rep.ratio_condition);
        assert!(rep.relation.is_some());
        assert!(!check_nonresonance(
            &[1.0, 2f64.sqrt()],
            &[1.0, 3f64.sqrt()],
            100
        ));
    }

    #[test]
    fn independent_square_roots_are_nonresonant() {
        let rep = nonresonance_report(&[1.0, 2f64.sqrt()], &[3f64.sqrt(), 5f64.sqrt()], 100);
        assert_eq!(rep.method, NonresonanceMethod::Exhaustive);
        assert!(rep.ratio_condition && rep.relation.is_none(), "{rep:?}");
        assert!(rep.nonresonant);
    }

    #[test]
    fn ratio_violation_wins() {
        let rep = nonresonance_report(&[2.0, 1.0], &[1.0, 3.0], 3);
        assert_eq!(rep.ratio_violation, Some((0, 1)));
        assert!(!rep.nonresonant);
    }

    #[test]
    fn lattice_search_finds_planted_relation() {
        let s2 = 2f64.sqrt();
        let s3 = 3f64.sqrt();
        // 3·1 + 2·√2 = 1·(3 + 2√2): plant it in ρ_3
        let r = [1.0, s2, s3, 5f64.sqrt()];
        let rho = [7f64.sqrt(), 11f64.sqrt(), 13f64.sqrt(), 3.0 + 2.0 * s2];
        let rep = nonresonance_report(&r, &rho, 10);
        assert_eq!(rep.method, NonresonanceMethod::Lattice);
        let (a, b) = rep.relation.expect("planted relation");
        assert!((dot(&a, &r) - dot(&b, &rho)).abs() < RELATION_TOL);
    }

    #[test]
    fn lattice_search_reports_none_for_independent_logs() {
        let r: Vec<f64> = [2.0f64, 3.0, 5.0, 7.0].iter().map(|x| x.ln()).collect();
        let rho: Vec<f64> = [11.0f64, 13.0, 17.0, 19.0].iter().map(|x| x.ln()).collect();
        assert!(nonresonance_report(&r, &rho, 5).relation.is_none());
    }
}
