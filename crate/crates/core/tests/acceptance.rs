//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lagconf::configuration::LinkConfig;
use lagconf::estimators::{axiom_suite, calabi_limit, quasi_state_counterexample, zeta0};
use lagconf::hofer::{
    flat_lower_bound, kernel_interval, odd_extension_on_kernel_interval, phi_k_flat, u_r,
};
use lagconf::novikov::NovikovScalar;
use lagconf::par::Exec;
use lagconf::profile::{random_piecewise_cubic, RadialProfile};
use lagconf::rational::{q, ExtRational, Rational};
use lagconf::recurrence::{
    density_bound_check, enumerate_and_verify, enumerate_clique_free, rotation_densities,
    RotationModel,
};
use lagconf::superpotential::{
    all_sign_vectors, block_matrix_determinant, build_superpotential, cartan_eigenvalues,
    cartan_eigenvalues_numeric, leading_order_solved, leading_solution, refine_critical_point,
    solve_numeric_oracle, Branch,
};

/// Coefficient tolerance for series identities.
const SERIES_TOL: f64 = 1e-12;
/// Closed-form versus numeric Cartan spectrum.
const EIGEN_TOL: f64 = 1e-10;
/// Required decay factor of the series-versus-oracle error from `t = 1e-2` to `1e-3`.
const RATIO_FACTOR: f64 = 5.0;
/// Flat lower bound versus `max|h|`.
const FLAT_TOL: f64 = 1e-4;
/// Largest approximant denominator for the flat bound.
const FLAT_MAX_DENOMINATOR: i64 = 10_000;
/// Resolution of the limit discrepancy.
const LIMIT_TOL: f64 = 1e-6;
/// Rotation densities versus `2r`.
const ROTATION_TOL: f64 = 0.01;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            "novikov algebra laws",
            Duration::from_secs(10),
            novikov_laws,
        ),
        ("cartan spectrum", Duration::from_secs(1), cartan_suite),
        ("leading order", Duration::from_secs(5), leading_order),
        (
            "refinement vs oracle",
            Duration::from_secs(30),
            refinement_vs_oracle,
        ),
        (
            "estimator values and axioms",
            Duration::from_secs(10),
            estimator_values,
        ),
        ("flat isometry", Duration::from_secs(10), flat_isometry),
        ("sharpness u(r) = 1/k", Duration::from_secs(5), sharpness),
        ("tau convergence", Duration::from_secs(20), tau_convergence),
        ("recurrence", Duration::from_secs(60), recurrence),
        ("kernel flats", Duration::from_secs(5), kernel_flats),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let out = std::panic::catch_unwind(f).unwrap_or_else(|_| outcome(false, "panicked"));
        let elapsed = t0.elapsed();
        let in_time = elapsed <= *limit;
        let pass = out.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "{} {:>2}. {name}: {} [{:.2}s / limit {}s{}]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            out.detail,
            elapsed.as_secs_f64(),
            limit.as_secs(),
            if in_time { "" } else { ", too slow" }
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn random_series(rng: &mut ChaCha8Rng, min_exp: i64, lead_scale: bool) -> NovikovScalar {
    let e0 = rng.gen_range(min_exp..20);
    let lead = if lead_scale {
        Complex64::from_polar(
            rng.gen_range(1.0..3.0),
            rng.gen_range(0.0..std::f64::consts::TAU),
        )
    } else {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    };
    let tail = (0..rng.gen_range(0..4)).map(|_| {
        (
            q(e0 + rng.gen_range(1..10), 10),
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        )
    });
    NovikovScalar::from_terms(
        std::iter::once((q(e0, 10), lead)).chain(tail.collect::<Vec<_>>()),
        ExtRational::Infinity,
    )
}

fn novikov_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cases = 10_000;
    let mut failures = [0usize; 4];
    let one = NovikovScalar::one();
    for _ in 0..cases {
        let x = random_series(&mut rng, -10, true);
        let y = random_series(&mut rng, -10, true);
        if (&x * &y).valuation() != x.valuation() + y.valuation() {
            failures[0] += 1;
        }
        let s = random_series(&mut rng, -10, false);
        if (&x + &s).valuation() < x.valuation().min(s.valuation()) {
            failures[1] += 1;
        }
        let v = x.valuation().finite().expect("nonzero");
        let g = Rational::ONE;
        let inv = x.invert(g + v).expect("invertible");
        if !(&x * &inv).eq_mod(&one, g, SERIES_TOL) {
            failures[2] += 1;
        }
        let p = random_series(&mut rng, 1, false);
        let g = q(2, 1);
        let round =
            &p.exp(g).expect("positive valuation") * &(-&p).exp(g).expect("positive valuation");
        if !round.eq_mod(&one, g, SERIES_TOL) {
            failures[3] += 1;
        }
    }
    let total: usize = failures.iter().sum();
    outcome(
        total == 0,
        format!("{cases} cases each; failures additivity/ultrametric/inverse/exp = {failures:?}"),
    )
}

fn cartan_suite() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut dets_ok = true;
    for k in 1..=12 {
        for (a, b) in cartan_eigenvalues(k)
            .iter()
            .zip(cartan_eigenvalues_numeric(k))
        {
            worst = worst.max((a - b).abs());
        }
        let expected = 2f64.powi(k as i32) * (k as f64 + 1.0);
        dets_ok &= (block_matrix_determinant(k) - expected).abs() <= 1e-9 * expected;
    }
    outcome(
        worst <= EIGEN_TOL && dets_ok,
        format!(
            "max eigenvalue gap {worst:.1e}; det(2·Id ⊕ A_k) = 2^k (k+1) for k ≤ 12: {dets_ok}"
        ),
    )
}

/// `B = 2/(k+3)`, so `C = B/2`, and `a = (B - C)/2`.
fn config_for(k: u32) -> LinkConfig {
    let d = k as i64 + 3;
    LinkConfig::new(k, q(2, d), q(1, 2 * d)).expect("valid configuration")
}

fn leading_order() -> Outcome {
    let mut cases = 0;
    let mut bad = Vec::new();
    for k in 1..=6 {
        let c = config_for(k);
        for signs in all_sign_vectors(k) {
            cases += 1;
            let s = build_superpotential(&c, &signs, NovikovScalar::zero()).expect("potential");
            let ok = leading_solution(&c, &signs, &Branch::default())
                .is_ok_and(|pt| leading_order_solved(&s, &pt));
            if !ok {
                bad.push((k, signs));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "{cases} (k, ε) cases, {} with nonzero leading residual",
            bad.len()
        ),
    )
}

fn refinement_vs_oracle() -> Outcome {
    let g_max = Rational::ONE;
    let mut pass = true;
    let mut parts = Vec::new();
    for (k, b, a) in [(2, q(2, 5), q(1, 10)), (3, q(3, 10), q(1, 20))] {
        let c = LinkConfig::new(k, b, a).expect("config");
        let signs = vec![1i8; k as usize - 1];
        let s = build_superpotential(&c, &signs, NovikovScalar::zero()).expect("potential");
        let start = leading_solution(&c, &signs, &Branch::default()).expect("leading");
        let point = match refine_critical_point(&s, &start, g_max) {
            Ok(p) => p,
            Err(e) => return outcome(false, format!("k={k}: {e}")),
        };
        let mut errs = Vec::new();
        for t in [1e-2, 1e-3] {
            match solve_numeric_oracle(&s, t) {
                Ok(z) => errs.push(
                    z.iter()
                        .zip(point.eval_at(t))
                        .map(|(x, y)| (x - y).norm())
                        .fold(0.0, f64::max),
                ),
                Err(e) => return outcome(false, format!("k={k} t={t}: {e}")),
            }
        }
        let ratio = errs[0] / errs[1];
        let scaled = [
            errs[0] / 1e-2f64.powf(g_max.to_f64()),
            errs[1] / 1e-3f64.powf(g_max.to_f64()),
        ];
        let ok = ratio >= RATIO_FACTOR && scaled[1] < scaled[0];
        pass &= ok;
        parts.push(format!(
            "k={k}: err {:.2e} → {:.2e}, ratio {ratio:.1}, err/t^g {:.2e} → {:.2e}",
            errs[0], errs[1], scaled[0], scaled[1]
        ));
    }
    outcome(pass, format!("g_max = {g_max}; {}", parts.join("; ")))
}

fn estimator_values() -> Outcome {
    // Independent oracle: explicit cubic at directly computed heights.
    let coeffs = [0.3, -1.2, 0.7, 2.5];
    let cubic = |z: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * z + c);
    let h = RadialProfile::polynomial_on(coeffs.to_vec(), q(-1, 2), q(1, 2)).expect("profile");
    let mut table_cases = 0;
    let mut table_err: f64 = 0.0;
    for k in 1..=8u32 {
        for num in 1..=50 {
            let b = q(num, 100);
            let c_exact = if k == 1 {
                Rational::ZERO
            } else {
                (Rational::ONE - b - b) / Rational::from_int(k as i64 - 1)
            };
            let admissible = if k == 1 {
                b == q(1, 2)
            } else {
                c_exact.is_positive() && b > c_exact
            };
            let c = c_exact.to_f64();
            if !admissible {
                continue;
            }
            let z0 = -0.5 + b.to_f64();
            let direct = (0..k).map(|j| cubic(z0 + j as f64 * c)).sum::<f64>() / k as f64;
            let v = zeta0(k, b, &h).expect("admissible pair");
            table_err = table_err.max((v - direct).abs());
            table_cases += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let samples: Vec<RadialProfile> = (0..200).map(|_| random_piecewise_cubic(&mut rng)).collect();
    let mut axioms_ok = true;
    let mut qs_ok = true;
    for c in [
        LinkConfig::new(2, q(2, 5), q(1, 10)),
        LinkConfig::new(3, q(3, 10), q(1, 20)),
    ] {
        let c = c.expect("config");
        let report = axiom_suite(&c, &samples, 7, Exec::default()).expect("axiom suite");
        axioms_ok &= report.passed;
        qs_ok &= quasi_state_counterexample(&c).expect("counterexample") == 1.0 / c.k as f64;
    }
    outcome(
        table_err <= 1e-12 && axioms_ok && qs_ok,
        format!(
            "ζ⁰ table: {table_cases} pairs, max gap {table_err:.1e}; axioms on 200 profiles: {axioms_ok}; 1/k counterexample exact: {qs_ok}"
        ),
    )
}

fn even_bump(c: Rational, w: Rational, height: f64) -> RadialProfile {
    let right = RadialProfile::bump(c, w, height).expect("bump");
    if c.is_zero() {
        return right;
    }
    right
        .try_add(&RadialProfile::bump(-c, w, height).expect("bump"))
        .expect("sum")
}

fn flat_isometry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_gap: f64 = 0.0;
    let mut overshoot = false;
    let mut max_den = 0;
    for i in 0..20 {
        // support [-b, b] with b = center + width < 1/6
        let center = if i == 0 {
            Rational::ZERO
        } else {
            q(rng.gen_range(1..=10), 100)
        };
        let width = q(rng.gen_range(1..=5), 100);
        let height = rng.gen_range(0.2..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let h = even_bump(center, width, height);
        let b = center + width;
        assert!(b < q(1, 6));
        let a = (q(1, 2) - Rational::from_int(3) * b) / Rational::from_int(2);
        let bound = match flat_lower_bound(&h, a, 12) {
            Ok(x) => x,
            Err(e) => return outcome(false, format!("profile {i}: {e}")),
        };
        max_den = max_den.max(
            bound
                .approximants
                .iter()
                .map(|(x, _)| x.denom())
                .max()
                .unwrap_or(0),
        );
        worst_gap = worst_gap.max(bound.max_abs - bound.lower);
        overshoot |= bound.lower > bound.max_abs + 1e-15;
    }
    outcome(
        worst_gap <= FLAT_TOL && !overshoot && max_den <= FLAT_MAX_DENOMINATOR,
        format!("20 profiles; max(max|h| - bound) = {worst_gap:.1e}; overshoot: {overshoot}; largest denominator {max_den}"),
    )
}

fn sharpness() -> Outcome {
    let delta = q(1, 1000);
    let mut bad = Vec::new();
    let mut n = 0;
    for j in (26..=32).chain(34..=49) {
        n += 1;
        let r = q(j, 100);
        match u_r(r, delta) {
            Ok(u) => {
                let target = 1.0 / u.k as f64;
                if !(u.lower == target && u.upper == target) {
                    bad.push(format!("r={r}: [{}, {}]", u.lower, u.upper));
                }
            }
            Err(e) => bad.push(format!("r={r}: {e}")),
        }
    }
    outcome(
        bad.is_empty(),
        format!("{n} radii with δ = {delta}; mismatches: {bad:?}"),
    )
}

fn tau_convergence() -> Outcome {
    let h: RadialProfile = "poly:[0,1]@[0,1/2]".parse().expect("profile");
    let b = q(2, 5);
    let rep = match calabi_limit(b, &h, 10_000, Exec::default()) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let limit = rep.riemann_candidate;
    let scaled_max = rep
        .table
        .iter()
        .filter(|(k, _)| *k >= 16)
        .map(|(k, v)| *k as f64 * (v - limit).abs())
        .fold(0.0, f64::max);
    let rate = rep.rate_exponent.unwrap_or(f64::NAN);
    let ok =
        rep.matches.as_deref() == Some("riemann") && rep.discrepancy <= LIMIT_TOL && rate <= -0.9;
    outcome(
        ok,
        format!(
            "limit {:.8} vs riemann {:.8} / unnormalized {:.8}; matches {:?}, discrepancy {:.1e}, slope {rate:.3}, sup k|τ_k - L| = {scaled_max:.3}",
            rep.empirical_limit, rep.riemann_candidate, rep.unnormalized_candidate, rep.matches, rep.discrepancy
        ),
    )
}

fn recurrence() -> Outcome {
    let exec = Exec::default();
    let mut parts = Vec::new();
    let mut pass = true;
    for (k, n) in [(2, 16), (3, 14)] {
        let rep = match enumerate_and_verify(k, n, exec) {
            Ok(r) => r,
            Err(e) => return outcome(false, e.to_string()),
        };
        pass &= rep.bound_holds;
        let sets = enumerate_clique_free(k, n, exec).expect("enumeration");
        let mut checked = 0;
        let mut violations = 0;
        for d in &sets {
            for m in 1..=n / k {
                if let Some(holds) = density_bound_check(d, k, m).holds {
                    checked += 1;
                    violations += usize::from(!holds);
                }
            }
        }
        pass &= violations == 0;
        parts.push(format!(
            "(k,N)=({k},{n}): min density {} ≥ {:.4}: {}, {} sets, m-q checks {checked} with {violations} violations",
            rep.min_density, rep.bound, rep.bound_holds, sets.len()
        ));
    }
    for r in [0.05, 0.1, 0.15, 0.2, 0.3] {
        let model = RotationModel::new(std::f64::consts::SQRT_2 - 1.0, r).expect("model");
        let rep = rotation_densities(&model, 100_000, exec);
        let ok =
            (rep.density - 2.0 * r).abs() <= ROTATION_TOL && rep.density >= 1.0 / (1.0 / r).floor();
        pass &= ok;
        parts.push(format!("r={r}: density {:.4}", rep.density));
    }
    outcome(pass, parts.join("; "))
}

fn kernel_flats() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut pass = true;
    let mut parts = Vec::new();
    let mut invariant_failures = 0;
    for k in 2..=5u32 {
        let (lo, hi, mid) = kernel_interval(k);
        let len = hi - lo;
        let b = q(1, k as i64 + 1) + len / Rational::from_int(4);
        let peak = q(-1, 2) + b;
        let w = len / Rational::from_int(16);
        let height = 1.0;
        let g = RadialProfile::bump(peak, w, height).expect("bump");
        let h = odd_extension_on_kernel_interval(k, &g).expect("odd extension");
        let flat = match phi_k_flat(k, b, &h) {
            Ok(f) => f,
            Err(e) => return outcome(false, format!("k={k}: {e}")),
        };
        let ok = flat.calabi == 0.0 && flat.lower == height;
        pass &= ok;
        parts.push(format!(
            "k={k}: lower {} calabi {}",
            flat.lower, flat.calabi
        ));
        // perturbations supported in the left half of I_k, away from the peak
        for _ in 0..25 {
            let pw = len / Rational::from_int(64);
            let left_room = (peak - w) - (lo + pw + pw);
            let right_room = (mid - pw) - (peak + w + pw);
            let slot = if rng.gen_bool(0.5) && left_room.is_positive() {
                lo + pw + left_room * q(rng.gen_range(0..=100), 100)
            } else {
                peak + w + pw + right_room * q(rng.gen_range(0..=100), 100)
            };
            let bump =
                RadialProfile::bump(slot, pw, rng.gen_range(-3.0..3.0)).expect("perturbation");
            let pert = odd_extension_on_kernel_interval(k, &bump).expect("odd perturbation");
            let lower = phi_k_flat(k, b, &h.try_add(&pert).expect("sum")).map(|f| f.lower);
            if !matches!(lower, Ok(v) if v == flat.lower) {
                invariant_failures += 1;
            }
        }
    }
    pass &= invariant_failures == 0;
    outcome(
        pass,
        format!(
            "{}; 100 perturbations, {invariant_failures} changed the bound",
            parts.join(", ")
        ),
    )
}
