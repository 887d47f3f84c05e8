//! Difference sets, Δ-cliques and recurrence densities.
//!
//! A set `D ⊆ [1, N]` colours an edge `{u, v}` of `[0, N]` red when
//! `|u - v| ∈ D`. A Δ-clique is a set of vertices whose pairwise
//! differences all lie in `D`; the recurrence set is `[1, N] \ D`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::rational::Rational;

/// `D ⊆ [1, N]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferenceSet {
    window: u32,
    elements: Vec<u32>,
    #[serde(skip)]
    member: Vec<bool>,
}

impl DifferenceSet {
    pub fn new(elements: impl IntoIterator<Item = u32>, window: u32) -> Result<Self> {
        let mut elements: Vec<u32> = elements.into_iter().collect();
        elements.sort_unstable();
        elements.dedup();
        if let Some(&bad) = elements.iter().find(|&&d| d == 0 || d > window) {
            return Err(Error::Precondition(format!(
                "element {bad} outside [1, {window}]"
            )));
        }
        let mut member = vec![false; window as usize + 1];
        for &d in &elements {
            member[d as usize] = true;
        }
        Ok(DifferenceSet {
            window,
            elements,
            member,
        })
    }

    fn from_mask(mask: u64, window: u32) -> Self {
        DifferenceSet::new((1..=window).filter(|i| mask >> i & 1 == 1), window)
            .expect("mask inside window")
    }

    pub fn window(&self) -> u32 {
        self.window
    }

    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn contains(&self, d: u32) -> bool {
        self.member.get(d as usize).copied().unwrap_or(false)
    }

    /// Whether the edge `{u, v}` is red.
    pub fn red(&self, u: u32, v: u32) -> bool {
        self.contains(u.abs_diff(v))
    }

    pub fn is_clique(&self, vertices: &[u32]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(i, &u)| vertices[i + 1..].iter().all(|&v| self.red(u, v)))
    }
}

/// `[1, N] \ D`.
pub fn recurrence_set(d: &DifferenceSet) -> Vec<u32> {
    (1..=d.window).filter(|&n| !d.contains(n)).collect()
}

/// Whether `[0, N]` contains a Δ-clique with `size` vertices.
pub fn has_delta_clique(d: &DifferenceSet, size: usize) -> bool {
    find_delta_clique(d, size).is_some()
}

/// A Δ-clique with `size` vertices, lexicographically smallest, if any.
pub fn find_delta_clique(d: &DifferenceSet, size: usize) -> Option<Vec<u32>> {
    let all: Vec<u32> = (0..=d.window).collect();
    clique_in(d, &all, size)
}

/// Lexicographically first clique of the given size among `vertices`
/// (sorted ascending).
fn clique_in(d: &DifferenceSet, vertices: &[u32], size: usize) -> Option<Vec<u32>> {
    fn extend(d: &DifferenceSet, cand: &[u32], clique: &mut Vec<u32>, size: usize) -> bool {
        if clique.len() == size {
            return true;
        }
        for (i, &v) in cand.iter().enumerate() {
            if clique.len() + cand.len() - i < size {
                return false;
            }
            let next: Vec<u32> = cand[i + 1..]
                .iter()
                .copied()
                .filter(|&u| d.red(u, v))
                .collect();
            clique.push(v);
            if extend(d, &next, clique, size) {
                return true;
            }
            clique.pop();
        }
        false
    }
    let mut clique = Vec::with_capacity(size);
    extend(d, vertices, &mut clique, size).then_some(clique)
}

/// Lexicographically smallest maximum Δ-clique among `vertices` (sorted).
fn maximum_clique_in(d: &DifferenceSet, vertices: &[u32]) -> Vec<u32> {
    fn search(d: &DifferenceSet, cand: &[u32], clique: &mut Vec<u32>, best: &mut Vec<u32>) {
        if clique.len() > best.len() {
            *best = clique.clone();
        }
        for (i, &v) in cand.iter().enumerate() {
            if clique.len() + cand.len() - i <= best.len() {
                return;
            }
            let next: Vec<u32> = cand[i + 1..]
                .iter()
                .copied()
                .filter(|&u| d.red(u, v))
                .collect();
            clique.push(v);
            search(d, &next, clique, best);
            clique.pop();
        }
    }
    let mut best = Vec::new();
    search(d, vertices, &mut Vec::new(), &mut best);
    best
}

/// Lexicographically smallest maximum Δ-clique in `[0, N]`.
pub fn maximum_delta_clique(d: &DifferenceSet) -> Vec<u32> {
    let all: Vec<u32> = (0..=d.window).collect();
    maximum_clique_in(d, &all)
}

/// Evidence for `|R ∩ [1, mk]| ≥ m - q` where `q = max Q` for a maximum
/// Δ-clique `Q`.
#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub k: u32,
    pub m: u32,
    pub window: u32,
    pub precondition_failures: Vec<String>,
    pub clique: Vec<u32>,
    pub q: u32,
    pub recurrence_count: u32,
    pub bound: i64,
    /// Largest number of blue neighbours in `[0, mk]` over `p ∈ Q`.
    pub max_blue_degree: u32,
    pub holds: Option<bool>,
}

pub fn density_bound_check(d: &DifferenceSet, k: u32, m: u32) -> DensityReport {
    let mut failures = Vec::new();
    let mk = m.saturating_mul(k);
    if k == 0 || m == 0 {
        failures.push("k and m must be positive".to_string());
    }
    if d.window < mk {
        failures.push(format!("window {} < mk = {mk}", d.window));
    }
    if has_delta_clique(d, k as usize + 1) {
        failures.push(format!("D has a Δ-clique of size {}", k + 1));
    }
    let clique = maximum_delta_clique(d);
    let q = clique.last().copied().unwrap_or(0);
    if q > mk {
        failures.push(format!("q = {q} exceeds mk = {mk}"));
    }
    let top = mk.min(d.window);
    let recurrence_count = (1..=top).filter(|&n| !d.contains(n)).count() as u32;
    let max_blue_degree = clique
        .iter()
        .map(|&p| (0..=top).filter(|&v| v != p && !d.red(v, p)).count() as u32)
        .max()
        .unwrap_or(0);
    let bound = m as i64 - q as i64;
    let holds = failures
        .is_empty()
        .then_some(recurrence_count as i64 >= bound);
    DensityReport {
        k,
        m,
        window: d.window,
        precondition_failures: failures,
        clique,
        q,
        recurrence_count,
        bound,
        max_blue_degree,
        holds,
    }
}

/// For a vertex set `A` without `(k+1)`-cliques: some vertex `p` of a maximum
/// clique `Q ⊆ A` has at least `(|A| - |Q|)/|Q| ≥ |A|/k - 1` blue neighbours
/// in `A`, hence `|R ∩ {|v - p| : v ∈ A}|` is at least half that.
#[derive(Clone, Debug, Serialize)]
pub struct SetDensityReport {
    pub size: usize,
    pub clique: Vec<u32>,
    pub pivot: u32,
    pub blue_degree: usize,
    pub distinct_recurrences: usize,
    pub bound: f64,
    pub holds: bool,
}

pub fn set_density_check(d: &DifferenceSet, k: u32, a: &[u32]) -> Result<SetDensityReport> {
    let mut a: Vec<u32> = a.to_vec();
    a.sort_unstable();
    a.dedup();
    if a.is_empty() || a.iter().any(|&v| v > d.window) {
        return Err(Error::Precondition(
            "A must be a nonempty subset of [0, N]".into(),
        ));
    }
    let clique = maximum_clique_in(d, &a);
    if clique.len() > k as usize {
        return Err(Error::Precondition(format!(
            "A contains a Δ-clique of size {}",
            clique.len()
        )));
    }
    let blue = |p: u32| a.iter().filter(|&&v| v != p && !d.red(v, p)).count();
    let pivot = *clique
        .iter()
        .max_by_key(|&&p| (blue(p), std::cmp::Reverse(p)))
        .expect("nonempty");
    let blue_degree = blue(pivot);
    let mut diffs: Vec<u32> = a
        .iter()
        .filter(|&&v| v != pivot && !d.red(v, pivot))
        .map(|&v| v.abs_diff(pivot))
        .collect();
    diffs.sort_unstable();
    diffs.dedup();
    let bound = a.len() as f64 / k as f64 - 1.0;
    let holds = blue_degree as f64 >= bound && 2 * diffs.len() >= blue_degree;
    Ok(SetDensityReport {
        size: a.len(),
        clique,
        pivot,
        blue_degree,
        distinct_recurrences: diffs.len(),
        bound,
        holds,
    })
}

/// Largest window handled by the bitmask enumeration.
pub const MAX_ENUMERATION_WINDOW: u32 = 62;

/// Whether adding `x` (larger than every element of `mask`) creates a
/// `(k+1)`-clique; any such clique contains an edge of length `x`, so it
/// can be translated to contain `0` and `x`.
fn creates_clique(mask: u64, x: u32, k: u32) -> bool {
    let with_x = mask | 1u64 << x;
    // vertices v in (0, x) joined to both 0 and x
    let cand: Vec<u32> = (1..x)
        .filter(|&v| mask >> v & 1 == 1 && with_x >> (x - v) & 1 == 1)
        .collect();
    let need = k as usize - 1;
    fn extend(mask: u64, cand: &[u32], depth: usize) -> bool {
        if depth == 0 {
            return true;
        }
        for (i, &v) in cand.iter().enumerate() {
            if cand.len() - i < depth {
                return false;
            }
            let next: Vec<u32> = cand[i + 1..]
                .iter()
                .copied()
                .filter(|&u| mask >> (u - v) & 1 == 1)
                .collect();
            if extend(mask, &next, depth - 1) {
                return true;
            }
        }
        false
    }
    k >= 1 && extend(mask, &cand, need)
}

/// Depth-first walk over clique-free sets, including an element before
/// excluding it.
struct Walker {
    k: u32,
    window: u32,
}

impl Walker {
    /// Visits every clique-free completion of `mask` (decided up to `next - 1`).
    fn visit(&self, mask: u64, next: u32, f: &mut impl FnMut(u64)) {
        if next > self.window {
            f(mask);
            return;
        }
        if !creates_clique(mask, next, self.k) {
            self.visit(mask | 1u64 << next, next + 1, f);
        }
        self.visit(mask, next + 1, f);
    }

    /// First maximum-size completion in visiting order.
    fn best(&self, mask: u64, next: u32, best: &mut Option<u64>) {
        let size = mask.count_ones();
        let best_size = best.map_or(-1, |b| b.count_ones() as i64);
        if next > self.window {
            if size as i64 > best_size {
                *best = Some(mask);
            }
            return;
        }
        if (size + self.window - next + 1) as i64 <= best_size {
            return;
        }
        if !creates_clique(mask, next, self.k) {
            self.best(mask | 1u64 << next, next + 1, best);
        }
        self.best(mask, next + 1, best);
    }

    /// Prefix masks deciding elements `1..=depth`, in visiting order.
    fn prefixes(&self, depth: u32) -> Vec<u64> {
        let mut out = Vec::new();
        let shallow = Walker {
            k: self.k,
            window: depth.min(self.window),
        };
        shallow.visit(0, 1, &mut |m| out.push(m));
        out
    }
}

fn check_window(k: u32, window: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    if window == 0 || window > MAX_ENUMERATION_WINDOW {
        return Err(Error::Precondition(format!(
            "window must lie in [1, {MAX_ENUMERATION_WINDOW}]"
        )));
    }
    Ok(())
}

const PREFIX_DEPTH: u32 = 10;

/// All `D ⊆ [1, N]` without a Δ-clique of size `k + 1`.
pub fn enumerate_clique_free(k: u32, window: u32, exec: Exec) -> Result<Vec<DifferenceSet>> {
    check_window(k, window)?;
    let walker = Walker { k, window };
    let prefixes = walker.prefixes(PREFIX_DEPTH);
    let start = PREFIX_DEPTH.min(window) + 1;
    let chunks = par::map(exec, &prefixes, |&p| {
        let mut out = Vec::new();
        walker.visit(p, start, &mut |m| out.push(m));
        out
    });
    Ok(chunks
        .into_iter()
        .flatten()
        .map(|m| DifferenceSet::from_mask(m, window))
        .collect())
}

/// Outcome of the exhaustive minimum-density search.
#[derive(Clone, Debug, Serialize)]
pub struct EnumerationReport {
    pub k: u32,
    pub window: u32,
    pub min_density: Rational,
    pub witness: Vec<u32>,
    /// Maximum Δ-clique of the witness.
    pub witness_clique: Vec<u32>,
    /// For each `x ∉ D`, a `(k+1)`-clique of `D ∪ {x}`: the witness is maximal.
    pub clique_certificate: Vec<(u32, Vec<u32>)>,
    pub bound: f64,
    pub bound_holds: bool,
}

/// Minimum of `|[1, N] \ D| / N` over clique-free `D`, with a witness.
pub fn enumerate_and_verify(k: u32, window: u32, exec: Exec) -> Result<EnumerationReport> {
    check_window(k, window)?;
    let walker = Walker { k, window };
    let prefixes = walker.prefixes(PREFIX_DEPTH);
    let start = PREFIX_DEPTH.min(window) + 1;
    let bests = par::map(exec, &prefixes, |&p| {
        let mut best = None;
        walker.best(p, start, &mut best);
        best
    });
    let mut winner: Option<u64> = None;
    for m in bests.into_iter().flatten() {
        if winner.is_none_or(|w| m.count_ones() > w.count_ones()) {
            winner = Some(m);
        }
    }
    let mask = winner.expect("the empty set is always clique-free");
    let d = DifferenceSet::from_mask(mask, window);
    let complement = window - mask.count_ones();
    let min_density = Rational::new(complement as i64, window as i64);
    let clique_certificate = recurrence_set(&d)
        .into_iter()
        .map(|x| {
            let bigger = DifferenceSet::new(d.elements().iter().copied().chain([x]), window)
                .expect("inside window");
            let clique = find_delta_clique(&bigger, k as usize + 1).unwrap_or_default();
            (x, clique)
        })
        .collect();
    let bound = 1.0 / k as f64 - k as f64 / window as f64;
    Ok(EnumerationReport {
        k,
        window,
        min_density,
        witness: d.elements().to_vec(),
        witness_clique: maximum_delta_clique(&d),
        clique_certificate,
        bound,
        bound_holds: min_density.to_f64() >= bound,
    })
}

/// Rotation by `alpha` on the unit circle and the arc `[0, r)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationModel {
    pub alpha: f64,
    pub r: f64,
}

impl RotationModel {
    pub fn new(alpha: f64, r: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) || !(r > 0.0 && r < 1.0) {
            return Err(Error::Precondition("need 0 ≤ α < 1 and 0 < r < 1".into()));
        }
        Ok(RotationModel { alpha, r })
    }

    /// Whether the `n`-th iterate of the arc meets the arc.
    pub fn returns(&self, n: u64) -> bool {
        let x = (n as f64 * self.alpha).fract();
        x.min(1.0 - x) < self.r
    }

    /// The non-returning times in `[1, N]`, a clique-free difference set.
    pub fn difference_set(&self, window: u32) -> DifferenceSet {
        DifferenceSet::new((1..=window).filter(|&n| !self.returns(n as u64)), window)
            .expect("inside window")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RotationReport {
    pub alpha: f64,
    pub r: f64,
    pub n: u64,
    pub k: u64,
    pub density: f64,
    pub lower_bound: f64,
}

/// Density of return times in `[1, N]`.
pub fn rotation_densities(model: &RotationModel, n: u64, exec: Exec) -> RotationReport {
    const CHUNK: u64 = 4096;
    let chunks = n.div_ceil(CHUNK);
    let count = par::sum_range(exec, 0..chunks, |c| {
        let lo = c * CHUNK + 1;
        let hi = ((c + 1) * CHUNK).min(n);
        (lo..=hi).filter(|&i| model.returns(i)).count() as u64
    });
    let k = (1.0 / model.r).floor() as u64;
    RotationReport {
        alpha: model.alpha,
        r: model.r,
        n,
        k,
        density: count as f64 / n as f64,
        lower_bound: 1.0 / k as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ds(e: &[u32], n: u32) -> DifferenceSet {
        DifferenceSet::new(e.iter().copied(), n).unwrap()
    }

    #[test]
    fn clique_examples() {
        assert!(has_delta_clique(&ds(&[1, 2], 4), 3));
        assert!(!has_delta_clique(&ds(&[1, 3, 5, 7, 9], 9), 3));
        assert!(has_delta_clique(&ds(&[5], 9), 2));
        assert!(!has_delta_clique(&ds(&[], 9), 2));
    }

    #[test]
    fn density_check_on_odd_numbers() {
        let d = ds(&[1, 3, 5, 7, 9, 11, 13, 15, 17, 19], 20);
        let r = density_bound_check(&d, 2, 10);
        assert!(r.precondition_failures.is_empty());
        assert_eq!(r.clique, vec![0, 1]);
        assert_eq!(r.recurrence_count, 10);
        assert_eq!(r.holds, Some(true));
        assert!(r.max_blue_degree >= 10);
        let bad = density_bound_check(&ds(&[1, 2], 4), 2, 2);
        assert!(!bad.precondition_failures.is_empty());
        assert_eq!(bad.holds, None);
    }

    #[test]
    fn enumeration_examples() {
        let r = enumerate_and_verify(2, 10, Exec::Sequential).unwrap();
        assert_eq!(r.min_density, Rational::new(1, 2));
        assert!(r.clique_certificate.iter().all(|(_, c)| c.len() == 3));
        let r = enumerate_and_verify(1, 7, Exec::Sequential).unwrap();
        assert_eq!(r.min_density, Rational::ONE);
        assert!(r.witness.is_empty());
        let seq = enumerate_and_verify(3, 12, Exec::Sequential).unwrap();
        let par = enumerate_and_verify(3, 12, Exec::Parallel).unwrap();
        assert_eq!(seq.witness, par.witness);
        assert!(seq.bound_holds);
    }

    #[test]
    fn rotation_examples() {
        let m = RotationModel::new(2f64.sqrt() - 1.0, 0.3).unwrap();
        let r = rotation_densities(&m, 100_000, Exec::Sequential);
        assert!((r.density - 0.6).abs() < 0.01);
        assert_eq!(
            rotation_densities(
                &RotationModel::new(0.0, 0.3).unwrap(),
                1000,
                Exec::Sequential
            )
            .density,
            1.0
        );
        assert_eq!(
            rotation_densities(
                &RotationModel::new(0.5, 0.3).unwrap(),
                1000,
                Exec::Sequential
            )
            .density,
            0.5
        );
        let d = m.difference_set(60);
        assert!(!has_delta_clique(&d, 4));
    }

    #[test]
    fn set_density_examples() {
        let d = ds(&[1, 3, 5, 7, 9], 10);
        let r = set_density_check(&d, 2, &(0..=10).collect::<Vec<_>>()).unwrap();
        assert!(r.holds);
        assert!(set_density_check(&ds(&[1, 2], 4), 2, &[0, 1, 2]).is_err());
    }

    fn brute_force_clique(d: &DifferenceSet, size: usize) -> bool {
        let n = d.window() + 1;
        (0u32..1 << n).any(|s| {
            let v: Vec<u32> = (0..n).filter(|i| s >> i & 1 == 1).collect();
            v.len() == size && d.is_clique(&v)
        })
    }

    proptest! {
        #[test]
        fn clique_search_matches_brute_force(mask in 0u32..1 << 9, size in 2usize..5) {
            let d = DifferenceSet::new((1..=9).filter(|i| mask >> i & 1 == 1), 9).unwrap();
            prop_assert_eq!(has_delta_clique(&d, size), brute_force_clique(&d, size));
        }

        #[test]
        fn three_cliques_are_schur_triples(mask in 0u32..1 << 14) {
            let n = 13;
            let d = DifferenceSet::new((1..=n).filter(|i| mask >> i & 1 == 1), n).unwrap();
            let schur = d.elements().iter().any(|&x| d.elements().iter().any(|&y| x + y <= n && d.contains(x + y)));
            prop_assert_eq!(has_delta_clique(&d, 3), schur);
        }

        #[test]
        fn cliques_translate(mask in 0u32..1 << 10, shift in 0u32..5) {
            let d = DifferenceSet::new((1..=10).filter(|i| mask >> i & 1 == 1), 10).unwrap();
            if let Some(c) = find_delta_clique(&d, 3) {
                let moved: Vec<u32> = c.iter().map(|v| v + shift).collect();
                prop_assert!(d.is_clique(&moved));
            }
        }
    }
}
