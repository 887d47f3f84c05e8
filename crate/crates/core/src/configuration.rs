//! Parallel-circle link configurations on the unit-area sphere.
//!
//! The sphere is identified with the height range `z ∈ [-1/2, 1/2]`, where
//! the cap below height `z` has area `z + 1/2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{q, Rational};

/// `k` parallel circles cutting the sphere into two caps of area `B`,
/// `k - 1` annuli of area `C`, and a radial bump size `a < B - C`.
///
/// For `k = 1` there are no annuli, `B = 1/2` and `C` is absent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkConfig {
    pub k: u32,
    #[serde(rename = "B")]
    pub b: Rational,
    #[serde(rename = "C", skip_serializing_if = "Option::is_none", default)]
    pub c: Option<Rational>,
    pub a: Rational,
}

impl LinkConfig {
    /// Validates `(k, B, a)` and derives `C = (1 - 2B)/(k - 1)`.
    pub fn new(k: u32, b: Rational, a: Rational) -> Result<Self> {
        let half = q(1, 2);
        if k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if k == 1 {
            if b != half {
                return Err(Error::InvalidConfig(format!(
                    "k = 1 requires B = 1/2, got {b}"
                )));
            }
            if !(a.is_positive() && a < half) {
                return Err(Error::InvalidConfig(format!(
                    "need 0 < a < 1/2, got a = {a}"
                )));
            }
            return Ok(LinkConfig { k, b, c: None, a });
        }
        let c = annulus_area(k, b)?;
        if !c.is_positive() {
            return Err(Error::InvalidConfig(format!(
                "annulus area C = {c} is not positive"
            )));
        }
        if b <= c {
            return Err(Error::InvalidConfig(format!(
                "need B > C, got B = {b}, C = {c}"
            )));
        }
        if !(a.is_positive() && a < b - c) {
            return Err(Error::InvalidConfig(format!(
                "need 0 < a < B - C = {}, got a = {a}",
                b - c
            )));
        }
        Ok(LinkConfig {
            k,
            b,
            c: Some(c),
            a,
        })
    }

    /// `C`, or zero when `k = 1`.
    pub fn c_or_zero(&self) -> Rational {
        self.c.unwrap_or(Rational::ZERO)
    }

    pub fn levels(&self) -> Vec<Rational> {
        levels(self.k, self.b, self.c_or_zero())
    }
}

/// `C = (1 - 2B)/(k - 1)` for `k ≥ 2`.
pub fn annulus_area(k: u32, b: Rational) -> Result<Rational> {
    if k < 2 {
        return Err(Error::InvalidConfig("annulus area needs k ≥ 2".into()));
    }
    Ok((Rational::ONE - b - b) / Rational::from_int(k as i64 - 1))
}

/// Heights `z_j = -1/2 + B + (j - 1)C` of the circles, `j = 1..k`.
pub fn levels(k: u32, b: Rational, c: Rational) -> Vec<Rational> {
    let start = q(-1, 2) + b;
    let d = Rational::common_denominator([&start, &c]);
    let (n0, nc) = (
        (start * Rational::from_int(d)).numer(),
        (c * Rational::from_int(d)).numer(),
    );
    (0..k as i64)
        .map(|j| Rational::new(n0 + j * nc, d))
        .collect()
}

/// Levels for `(k, B)` with `C` derived from the area constraint.
pub fn levels_for(k: u32, b: Rational) -> Result<Vec<Rational>> {
    match k {
        0 => Err(Error::InvalidConfig("k must be at least 1".into())),
        1 => Ok(vec![b - q(1, 2)]),
        _ => Ok(levels(k, b, annulus_area(k, b)?)),
    }
}

/// Areas of the complementary regions: cap, annuli, cap.
pub fn region_areas(k: u32, b: Rational, c: Rational) -> Vec<Rational> {
    let mut out = vec![b];
    out.extend(std::iter::repeat_n(c, k.saturating_sub(1) as usize));
    out.push(b);
    out
}

/// Whether the path-shaped dual tree with end weights `B` and inner weights
/// `C` admits the linear matching property, i.e. `B > C`.
pub fn linear_matching_property(k: u32, b: Rational, c: Rational) -> Result<bool> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    let total = b + b + Rational::from_int(k as i64 - 1) * c;
    if total != Rational::ONE {
        return Err(Error::InvalidConfig(format!("2B + (k-1)C = {total} ≠ 1")));
    }
    Ok(b > c)
}

/// A weighted tree: vertices are complementary regions, edges are circles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedTree {
    pub edges: Vec<(usize, usize)>,
    pub weights: Vec<Rational>,
}

impl WeightedTree {
    pub fn new(edges: Vec<(usize, usize)>, weights: Vec<Rational>) -> Result<Self> {
        let n = weights.len();
        if n == 0 {
            return Err(Error::InvalidConfig("tree has no vertices".into()));
        }
        if edges.len() + 1 != n {
            return Err(Error::InvalidConfig(format!(
                "{} edges for {n} vertices",
                edges.len()
            )));
        }
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(Error::InvalidConfig("weights must be positive".into()));
        }
        if weights.iter().copied().sum::<Rational>() != Rational::ONE {
            return Err(Error::InvalidConfig("weights must sum to 1".into()));
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            parent[x] = r;
            r
        }
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::InvalidConfig(format!(
                    "edge ({u}, {v}) out of range"
                )));
            }
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru == rv {
                return Err(Error::InvalidConfig("edges contain a cycle".into()));
            }
            parent[ru] = rv;
        }
        Ok(WeightedTree { edges, weights })
    }

    /// The path tree dual to a parallel-circle configuration.
    pub fn linear(k: u32, b: Rational, c: Rational) -> Result<Self> {
        let weights = region_areas(k, b, c);
        let edges = (0..k as usize).map(|i| (i, i + 1)).collect();
        WeightedTree::new(edges, weights)
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.weights.len()];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Matching property for path trees whose leaves share one weight and
    /// whose inner vertices share another.
    pub fn linear_matching_property(&self) -> Result<bool> {
        let deg = self.degrees();
        if self.weights.len() < 2 || deg.iter().any(|&d| d > 2) {
            return Err(Error::InvalidConfig("tree is not a path".into()));
        }
        let leaves: Vec<Rational> = (0..deg.len())
            .filter(|&i| deg[i] == 1)
            .map(|i| self.weights[i])
            .collect();
        let inner: Vec<Rational> = (0..deg.len())
            .filter(|&i| deg[i] == 2)
            .map(|i| self.weights[i])
            .collect();
        if leaves[0] != leaves[1] || inner.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::InvalidConfig(
                "path weights are not of the form (B, C, …, C, B)".into(),
            ));
        }
        match inner.first() {
            Some(&c) => linear_matching_property(self.edges.len() as u32, leaves[0], c),
            None => Ok(true),
        }
    }
}
