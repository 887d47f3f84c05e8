//! Hofer-geometry bounds obtained from radial profiles.

use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::configuration::{annulus_area, levels_for, LinkConfig};
use crate::error::{Error, Result};
use crate::estimators::{sigma_integral, zeta0_config};
use crate::profile::{ramp, Piece, PiecewisePoly, RadialProfile};
use crate::rational::{q, Rational};

const EVEN_TOL: f64 = 1e-12;
const MEAN_TOL: f64 = 1e-12;

/// Largest admissible half-width of the support in [`h_sharp`].
pub fn max_sharp_radius() -> Rational {
    q(1, 6)
}

/// Zero-mean even profile: `h` near the equator, `-h(1/2 - x)` near the
/// north pole and `-h(-1/2 - x)` near the south pole.
pub fn h_sharp(h: &RadialProfile, b: Rational) -> Result<RadialProfile> {
    if !(b.is_positive() && b < max_sharp_radius()) {
        return Err(Error::Precondition(format!(
            "need 0 < b < 1/6, got b = {b}"
        )));
    }
    if !h.is_even(EVEN_TOL * h.sup_norm().max(1.0)) {
        return Err(Error::InvalidProfile("h is not even".into()));
    }
    let Some((s0, s1)) = h.support() else {
        return Ok(RadialProfile::zero());
    };
    if s0 < -b || s1 > b {
        return Err(Error::InvalidProfile(format!(
            "support [{s0}, {s1}] not inside [-{b}, {b}]"
        )));
    }
    let f = h.as_poly();
    let center = f.restrict(-b, b)?;
    let north = f.restrict(Rational::ZERO, b)?.mirror(q(1, 4)).scale(-1.0);
    let south = f.restrict(-b, Rational::ZERO)?.mirror(q(-1, 4)).scale(-1.0);
    RadialProfile::new(PiecewisePoly::assemble(
        RadialProfile::lo(),
        RadialProfile::hi(),
        vec![south, center, north],
    )?)
}

/// Lower bound for the Hofer length of a flat built from an even profile.
#[derive(Clone, Debug, Serialize)]
pub struct FlatBound {
    pub lower: f64,
    pub max_abs: f64,
    pub x0: f64,
    pub approximants: Vec<(Rational, f64)>,
}

/// Denominator of the `i`-th rational approximant (1-based).
pub fn approximant_denominator(i: u32) -> i64 {
    10f64.powf(i as f64 / 3.0).round() as i64
}

/// Evaluates `ζ⁰_{2, 1/2 - x_i}(h#) = h(x_i)` at rational `x_i → x₀`, where
/// `|h|` peaks at `x₀`, and returns the supremum.
pub fn flat_lower_bound(h: &RadialProfile, a: Rational, approximants: u32) -> Result<FlatBound> {
    let max_abs = h.sup_norm();
    let Some((s0, s1)) = h.support() else {
        return Ok(FlatBound {
            lower: 0.0,
            max_abs,
            x0: 0.0,
            approximants: Vec::new(),
        });
    };
    let b = s1.max(-s0);
    let sharp = h_sharp(h, b)?;
    if !(a.is_positive() && a < q(1, 2) - Rational::from_int(3) * b) {
        return Err(Error::Precondition(format!(
            "need 0 < a < 1/2 - 3b = {}",
            q(1, 2) - Rational::from_int(3) * b
        )));
    }
    let (x0, peak) = h
        .as_poly()
        .argmax_abs_on(Rational::ZERO, b)
        .ok_or_else(|| Error::InvalidProfile("cannot locate the maximum".into()))?;
    let sign = if peak < 0.0 { -1.0 } else { 1.0 };
    let oriented = sharp.scale(sign);

    let mut table = Vec::new();
    for i in 1..=approximants {
        let d = approximant_denominator(i);
        let mut x = Rational::nearest_with_denominator(x0, d);
        if !x.is_positive() {
            x = q(1, d);
        }
        if x >= b {
            continue;
        }
        let cfg = LinkConfig::new(2, q(1, 2) - x, a)?;
        table.push((x, zeta0_config(&cfg, &oriented)));
    }
    let lower = table.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    Ok(FlatBound {
        lower,
        max_abs,
        x0,
        approximants: table,
    })
}

/// Smoothed indicator of `[m - δ, m + δ]`, `m = -1/2 + r`, extended as an odd
/// function about `m + 2δ`; ramps are C¹ cubics of width `δ/2`.
pub fn h_r_delta(r: Rational, delta: Rational) -> Result<RadialProfile> {
    if !delta.is_positive() || !r.is_positive() {
        return Err(Error::Precondition("r and δ must be positive".into()));
    }
    let m = q(-1, 2) + r;
    let lo = m - delta;
    let hi = m + Rational::from_int(5) * delta;
    if lo <= RadialProfile::lo() || hi >= RadialProfile::hi() {
        return Err(Error::Precondition(format!(
            "support [{lo}, {hi}] leaves (-1/2, 1/2)"
        )));
    }
    let w = delta / Rational::from_int(2);
    let at = |k: i64| m + delta * q(k, 2);
    let part = PiecewisePoly::new(vec![
        ramp(at(-2), w, 0.0, 1.0),
        Piece::new(at(-1), at(1), at(-1), vec![1.0]),
        ramp(at(1), w, 1.0, 0.0),
        Piece::zero(at(2), at(6)),
        ramp(at(6), w, 0.0, -1.0),
        Piece::new(at(7), at(9), at(7), vec![-1.0]),
        ramp(at(9), w, -1.0, 0.0),
    ])?;
    RadialProfile::new(PiecewisePoly::assemble(
        RadialProfile::lo(),
        RadialProfile::hi(),
        vec![part],
    )?)
}

/// `k` with `1/(k+1) < r < 1/k`, `k ≥ 2`.
pub fn packing_index(r: Rational) -> Result<u32> {
    if !(r.is_positive() && r < q(1, 2)) {
        return Err(Error::Precondition(format!("r = {r} must lie in (0, 1/2)")));
    }
    let k = r.recip().floor();
    if q(1, k) == r {
        return Err(Error::Precondition(format!(
            "r = {r} is a reciprocal integer"
        )));
    }
    Ok(k as u32)
}

#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticNormBounds {
    pub r: Rational,
    pub delta: Rational,
    pub k: u32,
    pub lower: f64,
    pub upper: f64,
    pub sharp: bool,
}

/// Two-sided bounds for the asymptotic Hofer norm of the flow of `h_{r,δ}`.
///
/// The lower bound integrates against the circle measure with `B = r`; the
/// upper bound packs copies of the disc bounded by the outer edge of the
/// support, of area `r + 5δ`.
pub fn u_r(r: Rational, delta: Rational) -> Result<AsymptoticNormBounds> {
    let k = packing_index(r)?;
    let c = annulus_area(k, r)?;
    let five = Rational::from_int(5);
    if delta * five >= c {
        return Err(Error::Precondition(format!(
            "δ = {delta} must be below C/5 = {}",
            c / five
        )));
    }
    let area = r + five * delta;
    if area > q(1, k as i64) {
        return Err(Error::Precondition(format!(
            "δ = {delta} too large: {k} discs of area {area} do not fit"
        )));
    }
    let h = h_r_delta(r, delta)?;
    let lower = sigma_integral(k, r, &h)?;
    let copies = area.recip().floor();
    let upper = sikorav_upper(copies as u64, area)?.to_f64();
    Ok(AsymptoticNormBounds {
        r,
        delta,
        k,
        lower,
        upper,
        sharp: lower == upper,
    })
}

/// `1/l`, provided `l` disjoint copies of a region of the given area fit.
pub fn sikorav_upper(l: u64, support_area: Rational) -> Result<Rational> {
    if l == 0 {
        return Err(Error::Precondition("l must be at least 1".into()));
    }
    if !support_area.is_positive() {
        return Err(Error::Precondition("support area must be positive".into()));
    }
    if Rational::from_int(l as i64) * support_area > Rational::ONE {
        return Err(Error::PackingObstructed {
            copies: l,
            area: support_area,
        });
    }
    Ok(q(1, l as i64))
}

/// The interval `I_k = (-1/2 + 1/(k+1), -1/2 + 1/k)` and its midpoint `υ_k`.
pub fn kernel_interval(k: u32) -> (Rational, Rational, Rational) {
    let lo = q(-1, 2) + q(1, k as i64 + 1);
    let hi = q(-1, 2) + q(1, k as i64);
    (lo, hi, (lo + hi) / Rational::from_int(2))
}

/// `g(x) - g(2υ_k - x)` for `g` supported in the left half of `I_k`.
pub fn odd_extension_on_kernel_interval(k: u32, g: &RadialProfile) -> Result<RadialProfile> {
    let (lo, _, mid) = kernel_interval(k);
    if let Some((s0, s1)) = g.support() {
        if s0 < lo || s1 > mid {
            return Err(Error::InvalidProfile(format!(
                "support [{s0}, {s1}] not inside [{lo}, {mid}]"
            )));
        }
    }
    let left = g.as_poly().restrict(lo, mid)?;
    let right = left.mirror(mid).scale(-1.0);
    RadialProfile::new(PiecewisePoly::assemble(
        RadialProfile::lo(),
        RadialProfile::hi(),
        vec![left, right],
    )?)
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelFlatBound {
    pub lower: f64,
    pub calabi: f64,
}

/// Bounds for the flat generated by `k · h ∘ z` with `h` zero-mean on `I_k`.
pub fn phi_k_flat(k: u32, b: Rational, h: &RadialProfile) -> Result<KernelFlatBound> {
    if k < 2 {
        return Err(Error::Precondition("k must be at least 2".into()));
    }
    let (lo, hi, _) = kernel_interval(k);
    if !(b > q(1, k as i64 + 1) && b < q(1, k as i64)) {
        return Err(Error::Precondition(format!(
            "B = {b} must lie in (1/{}, 1/{k})",
            k + 1
        )));
    }
    if let Some((s0, s1)) = h.support() {
        if s0 < lo || s1 > hi {
            return Err(Error::InvalidProfile(format!(
                "support [{s0}, {s1}] not inside I_{k}"
            )));
        }
    }
    let mean = h.mean_exact();
    if mean.abs().to_f64().unwrap_or(f64::INFINITY) > MEAN_TOL {
        return Err(Error::InvalidProfile(format!(
            "h is not zero-mean (∫h = {})",
            mean.to_f64().unwrap_or(f64::NAN)
        )));
    }
    let lower = levels_for(k, b)?.into_iter().map(|z| h.eval(z)).sum();
    let calabi = (mean * num_bigint::BigInt::from(k))
        .to_f64()
        .unwrap_or(f64::NAN);
    Ok(KernelFlatBound { lower, calabi })
}

#[derive(Clone, Debug, Serialize)]
pub struct BilipschitzReport {
    pub c2: f64,
    pub grid_min: f64,
    pub grid_size: u64,
    pub verified: bool,
}

/// `C₂ = ρ/(ρ + d)`, checked against `min_n max{1 - n·d, n·ρ}` over
/// `n = 0..=grid`.
pub fn bilipschitz_constant(rho: f64, d: f64, grid: u64) -> Result<BilipschitzReport> {
    if !(rho > 0.0 && d > 0.0 && rho.is_finite() && d.is_finite()) {
        return Err(Error::Precondition(
            "ρ and d must be positive and finite".into(),
        ));
    }
    let c2 = rho / (rho + d);
    let grid_min = (0..=grid)
        .map(|n| (1.0 - n as f64 * d).max(n as f64 * rho))
        .fold(f64::INFINITY, f64::min);
    Ok(BilipschitzReport {
        c2,
        grid_min,
        grid_size: grid,
        verified: grid_min >= c2 - 1e-12,
    })
}
