//! The `A_k` Cartan matrix and its spectrum.

use std::f64::consts::PI;

use nalgebra::DMatrix;

/// Tridiagonal `k × k` matrix with `2` on the diagonal and `-1` beside it.
pub fn cartan_matrix(k: usize) -> Vec<Vec<i64>> {
    assert!(k >= 1, "k must be at least 1");
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| match i.abs_diff(j) {
                    0 => 2,
                    1 => -1,
                    _ => 0,
                })
                .collect()
        })
        .collect()
}

/// `2 - 2cos(jπ/(k+1))` for `j = 1..k`, ascending.
pub fn cartan_eigenvalues(k: usize) -> Vec<f64> {
    (1..=k)
        .map(|j| 2.0 - 2.0 * (j as f64 * PI / (k as f64 + 1.0)).cos())
        .collect()
}

/// `-2(1 + cos(jπ/(k+1)))` for `j = 1..k`: exactly the negatives of the
/// true eigenvalues, kept so the two conventions can be compared.
pub fn negated_cartan_spectrum(k: usize) -> Vec<f64> {
    (1..=k)
        .map(|j| -2.0 * (1.0 + (j as f64 * PI / (k as f64 + 1.0)).cos()))
        .collect()
}

fn to_dmatrix(m: &[Vec<i64>]) -> DMatrix<f64> {
    let k = m.len();
    DMatrix::from_fn(k, k, |i, j| m[i][j] as f64)
}

/// Eigenvalues from a symmetric eigensolve, ascending.
pub fn cartan_eigenvalues_numeric(k: usize) -> Vec<f64> {
    let mut ev: Vec<f64> = to_dmatrix(&cartan_matrix(k))
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Determinant of `2·Id_k ⊕ A_k` via LU; equals `2^k (k + 1)`.
pub fn block_matrix_determinant(k: usize) -> f64 {
    let a = to_dmatrix(&cartan_matrix(k));
    let mut m = DMatrix::zeros(2 * k, 2 * k);
    m.view_mut((0, 0), (k, k)).copy_from(&a);
    for i in 0..k {
        m[(k + i, k + i)] = 2.0;
    }
    m.lu().determinant()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_matrices() {
        assert_eq!(cartan_matrix(1), vec![vec![2]]);
        assert_eq!(cartan_matrix(2), vec![vec![2, -1], vec![-1, 2]]);
        assert_eq!(
            cartan_matrix(3),
            vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]
        );
    }

    #[test]
    fn closed_form_matches_eigensolve() {
        for k in 1..=12 {
            let a = cartan_eigenvalues(k);
            let b = cartan_eigenvalues_numeric(k);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-10, "k={k}: {x} vs {y}");
            }
            let rel = (block_matrix_determinant(k) - 2f64.powi(k as i32) * (k as f64 + 1.0)).abs();
            assert!(rel < 1e-8 * 2f64.powi(k as i32) * (k as f64 + 1.0));
        }
        let e3 = cartan_eigenvalues(3);
        assert!((e3[0] - (2.0 - 2f64.sqrt())).abs() < 1e-12 && (e3[1] - 2.0).abs() < 1e-12);
        assert!((cartan_eigenvalues(2)[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn alternative_formula_is_the_negated_spectrum() {
        for k in 1..=8 {
            let mut neg: Vec<f64> = negated_cartan_spectrum(k).iter().map(|x| -x).collect();
            neg.sort_by(f64::total_cmp);
            let pos = cartan_eigenvalues_numeric(k);
            for (x, y) in neg.iter().zip(&pos) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
