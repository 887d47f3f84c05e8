//! Continuous piecewise-polynomial functions on rational partitions.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{q, Rational};

const CONTINUITY_TOL: f64 = 1e-9;

/// `Σ coeffs[n] · (x - origin)^n` on `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub lo: Rational,
    pub hi: Rational,
    pub origin: Rational,
    pub coeffs: Vec<f64>,
}

impl Piece {
    pub fn new(lo: Rational, hi: Rational, origin: Rational, coeffs: Vec<f64>) -> Self {
        Piece {
            lo,
            hi,
            origin,
            coeffs,
        }
    }

    pub fn zero(lo: Rational, hi: Rational) -> Self {
        Piece::new(lo, hi, lo, Vec::new())
    }

    fn local(&self, x: Rational) -> f64 {
        (x - self.origin).to_f64()
    }

    fn horner(&self, s: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }

    pub fn eval(&self, x: Rational) -> f64 {
        self.horner(self.local(x))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.horner(x - self.origin.to_f64())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0.0)
    }

    /// Same polynomial expanded about another origin.
    pub fn recentered(&self, origin: Rational) -> Piece {
        Piece {
            lo: self.lo,
            hi: self.hi,
            origin,
            coeffs: taylor_shift(&self.coeffs, (origin - self.origin).to_f64()),
        }
    }

    fn antiderivative_at(&self, x: Rational) -> f64 {
        let s = self.local(x);
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .fold(0.0, |acc, (n, c)| acc * s + c / (n as f64 + 1.0))
            * s
    }

    /// `∫_a^b` for `lo ≤ a ≤ b ≤ hi`.
    pub fn integral(&self, a: Rational, b: Rational) -> f64 {
        self.antiderivative_at(b) - self.antiderivative_at(a)
    }

    /// Exact integral of the stored (binary) coefficients.
    pub fn integral_exact(&self, a: Rational, b: Rational) -> BigRational {
        let to_big =
            |r: Rational| BigRational::new(BigInt::from(r.numer()), BigInt::from(r.denom()));
        let (sa, sb) = (to_big(a - self.origin), to_big(b - self.origin));
        let mut total = BigRational::zero();
        let (mut pa, mut pb) = (sa.clone(), sb.clone());
        for (n, c) in self.coeffs.iter().enumerate() {
            let c = BigRational::from_float(*c).unwrap_or_else(BigRational::zero);
            let denom = BigRational::from_integer(BigInt::from(n + 1));
            total += c * (&pb - &pa) / denom;
            pa *= &sa;
            pb *= &sb;
        }
        total
    }

    fn derivative_coeffs(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| n as f64 * c)
            .collect()
    }

    /// Minimum and maximum on the piece.
    pub fn extrema(&self) -> (f64, f64) {
        let (a, b) = (self.local(self.lo), self.local(self.hi));
        let mut candidates = vec![a, b];
        let d = self.derivative_coeffs();
        match d.len() {
            0 | 1 => {}
            2 => {
                if d[1] != 0.0 {
                    candidates.push(-d[0] / d[1]);
                }
            }
            3 => candidates.extend(quadratic_roots(d[2], d[1], d[0])),
            _ => {
                let eval_d = |s: f64| d.iter().rev().fold(0.0, |acc, c| acc * s + c);
                let steps = 512;
                let h = (b - a) / steps as f64;
                let mut prev = eval_d(a);
                for i in 1..=steps {
                    let s = a + h * i as f64;
                    let cur = eval_d(s);
                    if prev * cur < 0.0 {
                        let (mut l, mut r) = (s - h, s);
                        for _ in 0..60 {
                            let m = 0.5 * (l + r);
                            if eval_d(l) * eval_d(m) <= 0.0 {
                                r = m;
                            } else {
                                l = m;
                            }
                        }
                        candidates.push(0.5 * (l + r));
                    }
                    prev = cur;
                }
            }
        }
        candidates
            .into_iter()
            .filter(|s| *s >= a && *s <= b)
            .map(|s| self.horner(s))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
    }
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b != 0.0 { vec![-c / b] } else { Vec::new() };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let qv = -0.5 * (b + b.signum() * sq);
    let mut out = vec![qv / a];
    if qv != 0.0 {
        out.push(c / qv);
    }
    out
}

/// Coefficients of `p(s + d)` from those of `p(s)`.
fn taylor_shift(coeffs: &[f64], d: f64) -> Vec<f64> {
    let mut out = coeffs.to_vec();
    let n = out.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            out[j] += d * out[j + 1];
        }
    }
    out
}

/// A continuous function given by polynomial pieces on consecutive
/// rational intervals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewisePoly {
    pieces: Vec<Piece>,
}

impl PiecewisePoly {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidProfile("no pieces".into()));
        }
        for p in &pieces {
            if p.lo >= p.hi {
                return Err(Error::InvalidProfile(format!(
                    "empty piece [{}, {}]",
                    p.lo, p.hi
                )));
            }
            if p.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidProfile("non-finite coefficient".into()));
            }
        }
        for w in pieces.windows(2) {
            if w[0].hi != w[1].lo {
                return Err(Error::InvalidProfile(format!(
                    "gap or overlap at {}",
                    w[0].hi
                )));
            }
            let (l, r) = (w[0].eval(w[0].hi), w[1].eval(w[1].lo));
            if (l - r).abs() > CONTINUITY_TOL * l.abs().max(r.abs()).max(1.0) {
                return Err(Error::InvalidProfile(format!(
                    "discontinuity at {}: {l} vs {r}",
                    w[0].hi
                )));
            }
        }
        Ok(PiecewisePoly { pieces })
    }

    /// Drops adjacent duplicate-zero pieces; used after assembling.
    fn merged(pieces: Vec<Piece>) -> Vec<Piece> {
        let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
        for p in pieces {
            match out.last_mut() {
                Some(last) if last.is_zero() && p.is_zero() => last.hi = p.hi,
                _ => out.push(p),
            }
        }
        out
    }

    pub fn constant(lo: Rational, hi: Rational, c: f64) -> Self {
        PiecewisePoly {
            pieces: vec![Piece::new(lo, hi, lo, vec![c])],
        }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn domain(&self) -> (Rational, Rational) {
        (self.pieces[0].lo, self.pieces[self.pieces.len() - 1].hi)
    }

    pub fn breakpoints(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = self.pieces.iter().map(|p| p.lo).collect();
        out.push(self.domain().1);
        out
    }

    fn piece_index(&self, x: Rational) -> Option<usize> {
        let (lo, hi) = self.domain();
        if x < lo || x > hi {
            return None;
        }
        let i = self.pieces.partition_point(|p| p.hi <= x);
        Some(i.min(self.pieces.len() - 1))
    }

    /// Value at `x`; zero outside the domain.
    pub fn eval(&self, x: Rational) -> f64 {
        self.piece_index(x).map_or(0.0, |i| self.pieces[i].eval(x))
    }

    /// Sum of values at ascending points, sweeping the pieces once.
    pub fn sum_sorted(&self, xs: &[Rational]) -> f64 {
        let (lo, hi) = self.domain();
        let mut i = 0;
        let last = self.pieces.len() - 1;
        xs.iter()
            .filter(|x| **x >= lo && **x <= hi)
            .map(|x| {
                while i < last && self.pieces[i].hi <= *x {
                    i += 1;
                }
                self.pieces[i].eval(*x)
            })
            .sum()
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let (lo, hi) = self.domain();
        if x < lo.to_f64() || x > hi.to_f64() {
            return 0.0;
        }
        let i = self
            .pieces
            .partition_point(|p| p.hi.to_f64() <= x)
            .min(self.pieces.len() - 1);
        self.pieces[i].eval_f64(x)
    }

    /// `∫_a^b`, clipped to the domain.
    pub fn integral(&self, a: Rational, b: Rational) -> f64 {
        self.pieces
            .iter()
            .filter_map(|p| {
                let (l, r) = (p.lo.max(a), p.hi.min(b));
                (l < r).then(|| p.integral(l, r))
            })
            .sum()
    }

    pub fn integral_exact(&self, a: Rational, b: Rational) -> BigRational {
        self.pieces
            .iter()
            .filter_map(|p| {
                let (l, r) = (p.lo.max(a), p.hi.min(b));
                (l < r).then(|| p.integral_exact(l, r))
            })
            .fold(BigRational::zero(), |acc, x| acc + x)
    }

    pub fn total_integral(&self) -> f64 {
        let (lo, hi) = self.domain();
        self.integral(lo, hi)
    }

    pub fn scale(&self, s: f64) -> Self {
        PiecewisePoly {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    coeffs: p.coeffs.iter().map(|c| c * s).collect(),
                    ..p.clone()
                })
                .collect(),
        }
    }

    /// Adds a constant.
    pub fn offset(&self, c: f64) -> Self {
        let mut out = self.clone();
        for p in &mut out.pieces {
            if p.coeffs.is_empty() {
                p.coeffs.push(0.0);
            }
            p.coeffs[0] += c;
        }
        out
    }

    /// Pointwise sum over the common refinement; domains must match.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.domain() != other.domain() {
            return Err(Error::InvalidProfile("domains differ".into()));
        }
        let mut cuts = self.breakpoints();
        cuts.extend(other.breakpoints());
        cuts.sort();
        cuts.dedup();
        let pieces = cuts
            .windows(2)
            .map(|w| {
                let mid = (w[0] + w[1]) / Rational::from_int(2);
                let a = &self.pieces[self.piece_index(mid).expect("inside domain")];
                let b = &other.pieces[other.piece_index(mid).expect("inside domain")];
                // long Taylor shifts of steep pieces lose digits, so avoid them
                let (a, b) = match (a.is_zero(), b.is_zero()) {
                    (true, _) => (b.clone(), Piece::zero(w[0], w[1])),
                    (_, true) => (a.clone(), Piece::zero(w[0], w[1])),
                    _ if a.origin == b.origin => (a.clone(), b.clone()),
                    _ => (a.recentered(w[0]), b.recentered(w[0])),
                };
                let n = a.coeffs.len().max(b.coeffs.len());
                let coeffs = (0..n)
                    .map(|i| {
                        a.coeffs.get(i).copied().unwrap_or(0.0)
                            + b.coeffs.get(i).copied().unwrap_or(0.0)
                    })
                    .collect();
                Piece::new(w[0], w[1], a.origin, coeffs)
            })
            .collect();
        PiecewisePoly::new(pieces)
    }

    /// `x ↦ f(2c - x)` on the mirrored domain.
    pub fn mirror(&self, c: Rational) -> Self {
        let two_c = c + c;
        PiecewisePoly {
            pieces: self
                .pieces
                .iter()
                .rev()
                .map(|p| Piece {
                    lo: two_c - p.hi,
                    hi: two_c - p.lo,
                    origin: two_c - p.origin,
                    coeffs: p
                        .coeffs
                        .iter()
                        .enumerate()
                        .map(|(n, x)| if n % 2 == 1 { -x } else { *x })
                        .collect(),
                })
                .collect(),
        }
    }

    /// Restriction to `[a, b]` inside the domain.
    pub fn restrict(&self, a: Rational, b: Rational) -> Result<Self> {
        let (lo, hi) = self.domain();
        if a < lo || b > hi || a >= b {
            return Err(Error::InvalidProfile(format!(
                "cannot restrict to [{a}, {b}]"
            )));
        }
        let pieces = self
            .pieces
            .iter()
            .filter(|p| p.hi > a && p.lo < b)
            .map(|p| Piece {
                lo: p.lo.max(a),
                hi: p.hi.min(b),
                ..p.clone()
            })
            .collect();
        Ok(PiecewisePoly { pieces })
    }

    /// Joins functions on consecutive domains, filling gaps with zero.
    pub fn assemble(lo: Rational, hi: Rational, parts: Vec<PiecewisePoly>) -> Result<Self> {
        let mut pieces = Vec::new();
        let mut cursor = lo;
        for part in parts {
            let (a, b) = part.domain();
            if a < cursor {
                return Err(Error::InvalidProfile(format!("overlapping parts at {a}")));
            }
            if a > cursor {
                pieces.push(Piece::zero(cursor, a));
            }
            pieces.extend(part.pieces);
            cursor = b;
        }
        if cursor > hi {
            return Err(Error::InvalidProfile(format!("part extends beyond {hi}")));
        }
        if cursor < hi {
            pieces.push(Piece::zero(cursor, hi));
        }
        PiecewisePoly::new(Self::merged(pieces))
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.pieces
            .iter()
            .map(Piece::extrema)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (c, d)| {
                (a.min(c), b.max(d))
            })
    }

    /// Minimum and maximum over `[a, b]`.
    pub fn min_max_on(&self, a: Rational, b: Rational) -> (f64, f64) {
        self.restrict(a, b).map_or((0.0, 0.0), |r| r.min_max())
    }

    pub fn sup_norm(&self) -> f64 {
        let (lo, hi) = self.min_max();
        lo.abs().max(hi.abs())
    }

    /// Location and value of the largest `|f|` on `[a, b]`, sampled on the
    /// extremal candidates of each piece.
    pub fn argmax_abs_on(&self, a: Rational, b: Rational) -> Option<(f64, f64)> {
        let part = self.restrict(a, b).ok()?;
        let mut best: Option<(f64, f64)> = None;
        for p in part.pieces() {
            let (l, r) = (p.local(p.lo), p.local(p.hi));
            let mut cands = vec![l, r];
            let d = p.derivative_coeffs();
            if d.len() == 2 && d[1] != 0.0 {
                cands.push(-d[0] / d[1]);
            } else if d.len() == 3 {
                cands.extend(quadratic_roots(d[2], d[1], d[0]));
            } else if d.len() > 3 {
                let steps = 2048;
                cands.extend((0..=steps).map(|i| l + (r - l) * i as f64 / steps as f64));
            }
            for s in cands.into_iter().filter(|s| *s >= l && *s <= r) {
                let v = p.horner(s);
                if best.is_none_or(|(_, bv)| v.abs() > bv.abs()) {
                    best = Some((s + p.origin.to_f64(), v));
                }
            }
        }
        best
    }

    /// Smallest closed interval outside which the function vanishes.
    pub fn support(&self) -> Option<(Rational, Rational)> {
        let first = self.pieces.iter().find(|p| !p.is_zero())?;
        let last = self.pieces.iter().rev().find(|p| !p.is_zero())?;
        Some((first.lo, last.hi))
    }
}

/// A continuous function of the height `z ∈ [-1/2, 1/2]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RadialProfile(PiecewisePoly);

impl RadialProfile {
    pub fn lo() -> Rational {
        q(-1, 2)
    }

    pub fn hi() -> Rational {
        q(1, 2)
    }

    pub fn new(f: PiecewisePoly) -> Result<Self> {
        if f.domain() != (Self::lo(), Self::hi()) {
            return Err(Error::InvalidProfile(
                "radial profiles live on [-1/2, 1/2]".into(),
            ));
        }
        Ok(RadialProfile(f))
    }

    pub fn from_pieces(pieces: Vec<Piece>) -> Result<Self> {
        Self::new(PiecewisePoly::new(pieces)?)
    }

    pub fn as_poly(&self) -> &PiecewisePoly {
        &self.0
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        RadialProfile(PiecewisePoly::constant(Self::lo(), Self::hi(), c))
    }

    /// `Σ coeffs[n] z^n` on `[a, b]`, zero elsewhere; must be continuous.
    pub fn polynomial_on(coeffs: Vec<f64>, a: Rational, b: Rational) -> Result<Self> {
        if a < Self::lo() || b > Self::hi() || a >= b {
            return Err(Error::InvalidProfile(format!(
                "interval [{a}, {b}] not inside [-1/2, 1/2]"
            )));
        }
        let part = PiecewisePoly::new(vec![Piece::new(a, b, Rational::ZERO, coeffs)])?;
        Self::new(PiecewisePoly::assemble(Self::lo(), Self::hi(), vec![part])?)
    }

    /// C¹ bump of the given height at `center`, supported on
    /// `[center - width, center + width]`.
    pub fn bump(center: Rational, width: Rational, height: f64) -> Result<Self> {
        if !width.is_positive() || center - width < Self::lo() || center + width > Self::hi() {
            return Err(Error::InvalidProfile(format!(
                "bump at {center} of width {width} leaves [-1/2, 1/2]"
            )));
        }
        let up = ramp(center - width, width, 0.0, height);
        let down = ramp(center, width, height, 0.0);
        let part = PiecewisePoly::new(vec![up, down])?;
        Self::new(PiecewisePoly::assemble(Self::lo(), Self::hi(), vec![part])?)
    }

    /// C¹ Hermite interpolant through `(x_i, y_i, slope_i)`, zero-extended
    /// when the nodes do not reach the ends.
    pub fn hermite(nodes: &[(Rational, f64, f64)]) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidProfile("need at least two nodes".into()));
        }
        let pieces = nodes
            .windows(2)
            .map(|w| {
                let (x0, y0, m0) = w[0];
                let (x1, y1, m1) = w[1];
                let h = (x1 - x0).to_f64();
                let c2 = (3.0 * (y1 - y0) / h - 2.0 * m0 - m1) / h;
                let c3 = (m0 + m1 - 2.0 * (y1 - y0) / h) / (h * h);
                Piece::new(x0, x1, x0, vec![y0, m0, c2, c3])
            })
            .collect();
        let part = PiecewisePoly::new(pieces)?;
        Self::new(PiecewisePoly::assemble(Self::lo(), Self::hi(), vec![part])?)
    }

    pub fn eval(&self, z: Rational) -> f64 {
        self.0.eval(z)
    }

    pub fn eval_f64(&self, z: f64) -> f64 {
        self.0.eval_f64(z)
    }

    pub fn integral(&self, a: Rational, b: Rational) -> f64 {
        self.0.integral(a, b)
    }

    /// `∫_{-1/2}^{1/2}`.
    pub fn mean(&self) -> f64 {
        self.0.total_integral()
    }

    pub fn mean_exact(&self) -> BigRational {
        self.0.integral_exact(Self::lo(), Self::hi())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        Ok(RadialProfile(self.0.try_add(&other.0)?))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        RadialProfile(self.0.scale(s))
    }

    pub fn offset(&self, c: f64) -> Self {
        RadialProfile(self.0.offset(c))
    }

    /// `z ↦ h(-z)`.
    pub fn reflect(&self) -> Self {
        RadialProfile(self.0.mirror(Rational::ZERO))
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.sup_norm()
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.0.min_max()
    }

    pub fn support(&self) -> Option<(Rational, Rational)> {
        self.0.support()
    }

    pub fn is_even(&self, tol: f64) -> bool {
        self.sub(&self.reflect()).is_ok_and(|d| d.sup_norm() <= tol)
    }

    /// `max(h1 - h2) ≤ tol`.
    pub fn le(&self, other: &Self, tol: f64) -> bool {
        self.sub(other).is_ok_and(|d| d.min_max().1 <= tol)
    }
}

impl fmt::Display for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .pieces()
            .iter()
            .map(|p| format!("[{}, {}]@{}:{:?}", p.lo, p.hi, p.origin, p.coeffs))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// Smoothstep from `from` to `to` over `[lo, lo + w]`.
pub fn ramp(lo: Rational, w: Rational, from: f64, to: f64) -> Piece {
    let wf = w.to_f64();
    let d = to - from;
    Piece::new(
        lo,
        lo + w,
        lo,
        vec![from, 0.0, 3.0 * d / (wf * wf), -2.0 * d / (wf * wf * wf)],
    )
}

fn parse_real(s: &str) -> Result<f64> {
    let s = s.trim();
    s.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .or_else(|| s.parse::<Rational>().ok().map(Rational::to_f64))
        .ok_or_else(|| Error::Parse(format!("not a number: {s:?}")))
}

fn parse_list(s: &str) -> Result<Vec<&str>> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|x| x.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected [..] list, got {s:?}")))?;
    Ok(inner
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .collect())
}

fn parse_term(term: &str) -> Result<RadialProfile> {
    let (kind, body) = term
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("profile term {term:?} lacks a kind prefix")))?;
    let args = |n: usize| -> Result<Vec<&str>> {
        let v: Vec<&str> = body.split(',').map(str::trim).collect();
        if v.len() != n {
            return Err(Error::Parse(format!(
                "{kind} expects {n} arguments, got {body:?}"
            )));
        }
        Ok(v)
    };
    match kind.trim() {
        "const" => Ok(RadialProfile::constant(parse_real(body)?)),
        "poly" => {
            let (coeffs, interval) = body
                .split_once('@')
                .ok_or_else(|| Error::Parse("poly needs coefficients@[a,b]".into()))?;
            let coeffs = parse_list(coeffs)?
                .into_iter()
                .map(parse_real)
                .collect::<Result<Vec<_>>>()?;
            let bounds = parse_list(interval)?;
            if bounds.len() != 2 {
                return Err(Error::Parse(format!(
                    "poly interval must be [a,b], got {interval:?}"
                )));
            }
            RadialProfile::polynomial_on(coeffs, bounds[0].parse()?, bounds[1].parse()?)
        }
        "bump" => {
            let v = args(3)?;
            RadialProfile::bump(v[0].parse()?, v[1].parse()?, parse_real(v[2])?)
        }
        "indicator-smooth" => {
            let v = args(2)?;
            crate::hofer::h_r_delta(v[0].parse()?, v[1].parse()?)
        }
        other => Err(Error::Parse(format!("unknown profile kind {other:?}"))),
    }
}

impl FromStr for RadialProfile {
    type Err = Error;

    /// Grammar: terms `const:c`, `poly:[c0,c1,…]@[a,b]`,
    /// `bump:center,width,height`, `indicator-smooth:r,delta`, joined by `+`.
    fn from_str(s: &str) -> Result<Self> {
        let mut total: Option<RadialProfile> = None;
        for term in s.split('+').map(str::trim) {
            if term.is_empty() {
                return Err(Error::Parse(format!("empty term in profile {s:?}")));
            }
            let h = parse_term(term)?;
            total = Some(match total {
                None => h,
                Some(t) => t.try_add(&h)?,
            });
        }
        total.ok_or_else(|| Error::Parse("empty profile".into()))
    }
}

/// Random C¹ piecewise cubic on `[-1/2, 1/2]` with breakpoints on the
/// `1/64` grid, values in `[-1, 1]` and slopes in `[-4, 4]`.
pub fn random_piecewise_cubic<R: rand::Rng + ?Sized>(rng: &mut R) -> RadialProfile {
    let inner = rng.gen_range(2..8);
    let mut xs: Vec<i64> = (0..inner).map(|_| rng.gen_range(-31..32)).collect();
    xs.push(-32);
    xs.push(32);
    xs.sort_unstable();
    xs.dedup();
    let nodes: Vec<(Rational, f64, f64)> = xs
        .into_iter()
        .map(|x| (q(x, 64), rng.gen_range(-1.0..1.0), rng.gen_range(-4.0..4.0)))
        .collect();
    RadialProfile::hermite(&nodes).expect("nodes are increasing and span the domain")
}

/// Random cubic time factor on `[0, 1]`.
pub fn random_time_factor<R: rand::Rng + ?Sized>(rng: &mut R) -> PiecewisePoly {
    let coeffs = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
    PiecewisePoly::new(vec![Piece::new(
        Rational::ZERO,
        Rational::ONE,
        Rational::ZERO,
        coeffs,
    )])
    .expect("single piece")
}

/// A time factor on `[0, 1]` times a radial profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparableTerm {
    pub time: PiecewisePoly,
    pub space: RadialProfile,
}

/// `H(t, z) = Σ f_i(t) h_i(z)` for `t ∈ [0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeDepRadial {
    pub terms: Vec<SeparableTerm>,
}

impl TimeDepRadial {
    pub fn new(terms: Vec<SeparableTerm>) -> Result<Self> {
        for t in &terms {
            if t.time.domain() != (Rational::ZERO, Rational::ONE) {
                return Err(Error::InvalidProfile("time factors live on [0, 1]".into()));
            }
        }
        Ok(TimeDepRadial { terms })
    }

    pub fn autonomous(h: RadialProfile) -> Self {
        TimeDepRadial {
            terms: vec![SeparableTerm {
                time: PiecewisePoly::constant(Rational::ZERO, Rational::ONE, 1.0),
                space: h,
            }],
        }
    }

    /// Adds a function of time only.
    pub fn plus_time_function(&self, b: PiecewisePoly) -> Result<Self> {
        let mut terms = self.terms.clone();
        terms.push(SeparableTerm {
            time: b,
            space: RadialProfile::constant(1.0),
        });
        TimeDepRadial::new(terms)
    }

    pub fn eval(&self, t: f64, z: Rational) -> f64 {
        self.terms
            .iter()
            .map(|s| s.time.eval_f64(t) * s.space.eval(z))
            .sum()
    }
}
