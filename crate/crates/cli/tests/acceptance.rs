//! End-to-end acceptance suite.
//!
//! Each test covers one published claim about the system: closed-form gains
//! and their derivatives, scaling laws, protocol ordering, reciprocity,
//! phase coherence, baseline comparisons, and bit-exact reproducibility.
//! Every test prints a `[PASS]`/`[FAIL]` scoreboard line before asserting,
//! so `cargo test -p swan-cli --test acceptance -- --nocapture` yields a
//! compact report even when a check fails. Runtime budgets are asserted
//! alongside the numeric claims.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use swan_core::{
    avg_gain_ss, dl_place, dl_place_dense, dl_snr, dl_ss_approx,
    effective_distance, gain_derivatives, gain_ratio, make_radio_config, midpoint_oracle,
    phase_spread, run_sweep, sa_lemma2_bracket, sa_min_segments, sa_place, sa_snr,
    sa_uplink_approx, sm_place, sm_snr, sm_uplink_approx, ss_place, ss_snr, ApproxParams,
    CurveTag, Direction, LinkBudget, MidpointKind, MultiPlacement, Protocol, RadioConfig,
    SaApproxVariant, ScenarioConfig, SmApproxVariant, SsPlacementMode, SweepResult,
    SweepVariable, UserLocation, WaveguideLayout,
};

// ---- shared fixtures ----

/// 10 dBm transmit power over a -90 dBm noise floor.
fn reference_budget() -> LinkBudget {
    LinkBudget::new(0.01, 1e-12).unwrap()
}

fn lossless_radio() -> RadioConfig {
    make_radio_config(28.0e9, 1.4, 0.0).unwrap()
}

fn lossy_radio() -> RadioConfig {
    make_radio_config(28.0e9, 1.4, 0.08).unwrap()
}

/// Centered layout 3 m above the user plane at half-wavelength spacing.
fn centered_layout(num_segments: usize, segment_length_m: f64, radio: &RadioConfig) -> WaveguideLayout {
    WaveguideLayout::centered(
        num_segments,
        segment_length_m,
        0.0,
        3.0,
        radio.wavelength_m / 2.0,
    )
    .unwrap()
}

/// Exact aggregation SNR for a user at the origin under the array center.
fn exact_sa_snr(num_segments: usize, segment_length_m: f64, radio: &RadioConfig) -> f64 {
    let layout = centered_layout(num_segments, segment_length_m, radio);
    let user = UserLocation::new(0.0, 0.0, &layout);
    let placement = sa_place(&user, &layout, radio).unwrap();
    sa_snr(&user, &placement, &layout, radio, &reference_budget())
        .unwrap()
        .snr
}

/// Exact multiplexing SNR for a user at the origin under the array center.
fn exact_sm_snr(num_segments: usize, segment_length_m: f64, radio: &RadioConfig) -> f64 {
    let layout = centered_layout(num_segments, segment_length_m, radio);
    let user = UserLocation::new(0.0, 0.0, &layout);
    let placement = sm_place(&user, &layout).unwrap();
    sm_snr(&user, &placement, &layout, radio, &reference_budget())
        .unwrap()
        .snr
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

/// Prints the scoreboard line for one acceptance check.
fn report(index: usize, label: &str, ok: bool, detail: &str) {
    let status = if ok { "PASS" } else { "FAIL" };
    println!("[{status}] {index:02} {label} ({detail})");
}

// ---- 01: selection gain threshold ----

#[test]
fn a01_selection_gain_reaches_the_threshold_by_nine_segments() {
    let started = Instant::now();
    let gain = avg_gain_ss(9.0, 100.0, 0.0092).unwrap();
    let elapsed = started.elapsed();
    let budget = Duration::from_millis(1);
    let ok = (gain - 0.9044).abs() <= 1e-3 && gain >= 0.9 && elapsed <= budget;
    report(
        1,
        "selection gain threshold at nine segments",
        ok,
        &format!("gain {gain:.6} in {elapsed:?}"),
    );
    assert!(
        (gain - 0.9044).abs() <= 1e-3,
        "expected 0.9044 within 1e-3, got {gain}"
    );
    assert!(gain >= 0.9, "expected at least 0.9, got {gain}");
    assert!(elapsed <= budget, "expected under 1 ms, got {elapsed:?}");
}

// ---- 02: gain derivatives ----

/// Central difference of the average gain in the segment count.
fn fd_first(m: f64, d_x: f64, alpha: f64) -> f64 {
    let h = 1e-4 * m;
    let up = avg_gain_ss(m + h, d_x, alpha).unwrap();
    let down = avg_gain_ss(m - h, d_x, alpha).unwrap();
    (up - down) / (2.0 * h)
}

/// Central difference of the first derivative in the segment count.
///
/// The first derivative equals `psi(t) / beta` with
/// `psi(t) = 1 - (1 + t) e^(-t)` and `t = beta / M`, so only `psi` values at
/// two nearby `t` are subtracted. Below `t = 1` the difference is formed
/// from `psi` with the leading constant removed through `exp_m1`; above it
/// the difference equals `eps(t_minus) - eps(t_plus)` for the complement
/// `eps(t) = (1 + t) e^(-t)`, whose product form keeps relative precision
/// once `psi` itself rounds to one.
fn fd_second(m: f64, d_x: f64, alpha: f64) -> f64 {
    let beta = 2.0 * alpha * d_x;
    let t = beta / m;
    let h = 3e-4 * m / (1.0 + t);
    let t_plus = beta / (m + h);
    let t_minus = beta / (m - h);
    let numerator = if t > 1.0 {
        let eps = |t: f64| (1.0 + t) * (-t).exp();
        eps(t_minus) - eps(t_plus)
    } else {
        let psi = |t: f64| -f64::exp_m1(-t) - t * (-t).exp();
        psi(t_plus) - psi(t_minus)
    };
    numerator / (2.0 * h * beta)
}

#[test]
fn a02_gain_derivatives_match_central_finite_differences() {
    let started = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(0xACCE_0002);
    let mut worst_first = (0.0f64, String::new());
    let mut worst_second = (0.0f64, String::new());
    let mut bad_sign: Option<String> = None;
    for _ in 0..100 {
        let m = rng.gen_range(1.0..200.0);
        let d_x = rng.gen_range(10.0..500.0);
        let alpha = rng.gen_range(1e-3..5e-2);
        let (d1, d2) = gain_derivatives(m, d_x, alpha).unwrap();
        if !(d1 > 0.0 && d2 < 0.0) && bad_sign.is_none() {
            bad_sign = Some(format!("d1 {d1}, d2 {d2} at M={m}, Dx={d_x}, alpha={alpha}"));
        }
        let r1 = (d1 - fd_first(m, d_x, alpha)).abs() / d1.abs();
        let r2 = (d2 - fd_second(m, d_x, alpha)).abs() / d2.abs();
        if r1 > worst_first.0 {
            worst_first = (r1, format!("M={m}, Dx={d_x}, alpha={alpha}"));
        }
        if r2 > worst_second.0 {
            worst_second = (r2, format!("M={m}, Dx={d_x}, alpha={alpha}"));
        }
    }
    let elapsed = started.elapsed();
    let budget = Duration::from_secs(1);
    let ok = worst_first.0 <= 1e-6
        && worst_second.0 <= 1e-6
        && bad_sign.is_none()
        && elapsed <= budget;
    report(
        2,
        "gain derivatives match finite differences",
        ok,
        &format!(
            "worst rel {:.2e} and {:.2e} over 100 points in {elapsed:?}",
            worst_first.0, worst_second.0
        ),
    );
    assert!(
        bad_sign.is_none(),
        "expected signs +/-, got {}",
        bad_sign.unwrap_or_default()
    );
    assert!(
        worst_first.0 <= 1e-6,
        "expected first derivative within 1e-6 relative, got {} at {}",
        worst_first.0,
        worst_first.1
    );
    assert!(
        worst_second.0 <= 1e-6,
        "expected second derivative within 1e-6 relative, got {} at {}",
        worst_second.0,
        worst_second.1
    );
    assert!(elapsed <= budget, "expected under 1 s, got {elapsed:?}");
}

// ---- 03: gain ratio monotonicity ----

#[test]
fn a03_gain_ratio_grows_with_span_and_segment_count() {
    let started = Instant::now();
    let alpha = 0.0092;
    let mut violation: Option<String> = None;
    for m in [2.0, 8.0, 32.0] {
        let mut prev = f64::NEG_INFINITY;
        for step in 0..50 {
            let d_x = 10.0 + 10.0 * step as f64;
            let ratio = gain_ratio(m, d_x, alpha).unwrap();
            if ratio <= prev && violation.is_none() {
                violation = Some(format!("ratio {ratio} after {prev} at M={m}, Dx={d_x}"));
            }
            prev = ratio;
        }
    }
    for d_x in [50.0, 100.0, 200.0] {
        let mut prev = f64::NEG_INFINITY;
        for m in 1..=60 {
            let ratio = gain_ratio(m as f64, d_x, alpha).unwrap();
            if ratio <= prev && violation.is_none() {
                violation = Some(format!("ratio {ratio} after {prev} at M={m}, Dx={d_x}"));
            }
            prev = ratio;
        }
    }
    let elapsed = started.elapsed();
    let budget = Duration::from_secs(1);
    let ok = violation.is_none() && elapsed <= budget;
    report(
        3,
        "gain ratio grows with span and segment count",
        ok,
        &format!("strict on both grids in {elapsed:?}"),
    );
    assert!(
        violation.is_none(),
        "expected strict growth, got {}",
        violation.unwrap_or_default()
    );
    assert!(elapsed <= budget, "expected under 1 s, got {elapsed:?}");
}

// ---- 04: aggregation closed form ----

#[test]
fn a04_aggregation_closed_form_tracks_the_exact_sum() {
    let started = Instant::now();
    let radio = lossless_radio();
    let delta = radio.wavelength_m / 2.0;
    let budget_link = reference_budget();
    let mut worst = (0.0f64, 0usize);
    for m in (11..=201).step_by(2) {
        let exact = exact_sa_snr(m, 1.0, &radio);
        let params = ApproxParams::new(m, 1.0, 9.0, delta).unwrap();
        let approx =
            sa_uplink_approx(SaApproxVariant::Lemma2, &params, &budget_link, radio.eta_m2)
                .unwrap();
        let rel = (exact - approx).abs() / exact;
        if rel > worst.0 {
            worst = (rel, m);
        }
    }
    let params = ApproxParams::new(101, 1.0, 9.0, delta).unwrap();
    let bracket = sa_lemma2_bracket(&params).unwrap();
    let oracle = midpoint_oracle(MidpointKind::InverseDistance, 101, 1.0, 9.0).unwrap();
    let reference = 1.0 / 3.0 + 2.0 * oracle;
    let residual = (bracket - reference).abs() / reference;
    let elapsed = started.elapsed();
    let budget = Duration::from_secs(5);
    let ok = worst.0 <= 1e-2 && residual <= 1e-3 && elapsed <= budget;
    report(
        4,
        "aggregation closed form tracks the exact sum",
        ok,
        &format!(
            "worst rel {:.2e} at M={}, bracket residual {residual:.2e} in {elapsed:?}",
            worst.0, worst.1
        ),
    );
    assert!(
        worst.0 <= 1e-2,
        "expected relative error at most 1e-2, got {} at M={}",
        worst.0,
        worst.1
    );
    assert!(
        residual <= 1e-3,
        "expected bracket residual at most 1e-3, got {residual}"
    );
    assert!(elapsed <= budget, "expected under 5 s, got {elapsed:?}");
}

// ---- 05: aggregation minimum ----

#[test]
fn a05_aggregation_minimum_matches_the_closed_form_rule() {
    let started = Instant::now();
    let radio = lossless_radio();
    let rule = sa_min_segments(100.0, 9.0).unwrap();
    let mut best = (usize::MAX, f64::INFINITY);
    for m in (1..=41).step_by(2) {
        let snr = exact_sa_snr(m, 100.0 / m as f64, &radio);
        if snr < best.1 {
            best = (m, snr);
        }
    }
    let elapsed = started.elapsed();
    let budget = Duration::from_secs(10);
    let gap = (best.0 as f64 - rule).abs();
    let ok = gap <= 2.0 && elapsed <= budget;
    report(
        5,
        "aggregation minimum matches the closed form rule",
        ok,
        &format!(
            "exact argmin M={} over odd 1..=41, closed form rule {rule:.2}, in {elapsed:?}",
            best.0
        ),
    );
    assert!(elapsed <= budget, "expected under 10 s, got {elapsed:?}");
    assert!(
        gap <= 2.0,
        "expected the exact argmin within 2 of the rule {rule:.2}, got M={}",
        best.0
    );
}

// ---- 06: aggregation interior maximum ----

#[test]
fn a06_aggregation_snr_peaks_at_an_interior_span() {
    let started = Instant::now();
    let radio = lossless_radio();
    let mut spans: Vec<usize> = (11..=499).step_by(2).collect();
    spans.push(500);
    let snrs: Vec<f64> = spans
        .iter()
        .map(|&m| exact_sa_snr(m, 1.0, &radio))
        .collect();
    let argmax = (0..snrs.len())
        .max_by(|&i, &j| snrs[i].partial_cmp(&snrs[j]).unwrap())
        .unwrap();
    let mut shape: Option<String> = None;
    for i in 0..snrs.len() - 1 {
        let rising = snrs[i] < snrs[i + 1];
        if rising != (i < argmax) && shape.is_none() {
            shape = Some(format!(
                "{} then {} around span {}",
                snrs[i],
                snrs[i + 1],
                spans[i]
            ));
        }
    }
    let interior = argmax > 0 && argmax < snrs.len() - 1;
    let tail_ok = *snrs.last().unwrap() < snrs[argmax] / 2.0;
    let elapsed = started.elapsed();
    let budget = Duration::from_secs(30);
    let ok = shape.is_none() && interior && tail_ok && elapsed <= budget;
    report(
        6,
        "aggregation snr peaks at an interior span",
        ok,
        &format!(
            "peak {:.1} at span {} m, tail {:.1} at 500 m, in {elapsed:?}",
            snrs[argmax], spans[argmax], snrs[snrs.len() - 1]
        ),
    );
    assert!(
        shape.is_none(),
        "expected a single rise and fall, got {}",
        shape.unwrap_or_default()
    );
    assert!(interior, "expected an interior argmax, got index {argmax}");
    assert!(
        tail_ok,
        "expected the 500 m value below half the peak, got {} vs peak {}",
        snrs[snrs.len() - 1],
        snrs[argmax]
    );
    assert!(elapsed <= budget, "expected under 30 s, got {elapsed:?}");
}

// ---- 07: multiplexing bounds ----

#[test]
fn a07_multiplexing_snr_is_monotone_bounded_and_saturating() {
    let started = Instant::now();
    let radio = lossless_radio();
    let delta = radio.wavelength_m / 2.0;
    let budget_link = reference_budget();
    let mut violation: Option<String> = None;
    let mut prev = 0.0f64;
    for m in (11..=401).step_by(2) {
        let exact = exact_sm_snr(m, 1.0, &radio);
        if exact <= prev && violation.is_none() {
            violation = Some(format!("{exact} after {prev} at M={m}"));
        }
        prev = exact;
        let params = ApproxParams::new(m, 1.0, 9.0, delta).unwrap();
        let upper =
            sm_uplink_approx(SmApproxVariant::Upper, &params, &budget_link, radio.eta_m2)
                .unwrap();
        if exact >= upper && violation.is_none() {
            violation = Some(format!("exact {exact} above the ceiling {upper} at M={m}"));
        }
    }
    let params = ApproxParams::new(401, 1.0, 9.0, delta).unwrap();
    let limit =
        sm_uplink_approx(SmApproxVariant::Limit, &params, &budget_link, radio.eta_m2).unwrap();
    let exact = exact_sm_snr(401, 1.0, &radio);
    let gap = (limit - exact).abs() / limit;
    let limit_dev = (limit - 8.41e3).abs() / 8.41e3;
    let elapsed = started.elapsed();
    let budget = Duration::from_secs(10);
    let ok = violation.is_none() && gap <= 0.02 && limit_dev <= 0.01 && elapsed <= budget;
    report(
        7,
        "multiplexing snr monotone bounded saturating",
        ok,
        &format!(
            "exact {exact:.1} within {:.2}% of ceiling {limit:.1} in {elapsed:?}",
            gap * 100.0
        ),
    );
    assert!(
        violation.is_none(),
        "expected monotone growth below the ceiling, got {}",
        violation.unwrap_or_default()
    );
    assert!(
        limit_dev <= 0.01,
        "expected the saturation level near 8.41e3, got {limit}"
    );
    assert!(
        gap <= 0.02,
        "expected within 2% of the saturation level, got {gap}"
    );
    assert!(elapsed <= budget, "expected under 10 s, got {elapsed:?}");
}

// ---- 08: pointwise protocol ordering ----

#[test]
fn a08_multiplexing_dominates_the_other_protocols_pointwise() {
    let started = Instant::now();
    let radio = lossless_radio();
    let delta = radio.wavelength_m / 2.0;
    let budget_link = reference_budget();
    let mut rng = ChaCha12Rng::seed_from_u64(0xACCE_0008);
    let mut violations = 0usize;
    let mut first: Option<String> = None;
    for i in 0..10_000 {
        let m = rng.gen_range(1..=64usize);
        let l = rng.gen_range(0.5..3.0);
        let height = rng.gen_range(1.5..6.0);
        let layout = WaveguideLayout::centered(m, l, 0.0, height, delta).unwrap();
        let (lo, hi) = layout.span();
        let u_x = rng.gen_range(lo..hi);
        let u_y = rng.gen_range(-10.0..10.0);
        let user = UserLocation::new(u_x, u_y, &layout);

        let ss = ss_place(&user, &layout, &radio, SsPlacementMode::Exact).unwrap();
        let ss = ss_snr(&user, &ss, &layout, &radio, &budget_link).unwrap().snr;
        let sa = sa_place(&user, &layout, &radio).unwrap();
        let sa = sa_snr(&user, &sa, &layout, &radio, &budget_link).unwrap().snr;
        let sm = sm_place(&user, &layout).unwrap();
        let sm = sm_snr(&user, &sm, &layout, &radio, &budget_link).unwrap().snr;

        let tol_sa = 1e-12 * sa.abs().max(sm.abs());
        let tol_ss = 1e-12 * ss.abs().max(sm.abs());
        if sm < sa - tol_sa || sm < ss - tol_ss {
            violations += 1;
            if first.is_none() {
                first = Some(format!(
                    "iteration {i}: sm {sm}, sa {sa}, ss {ss} at M={m}, L={l:.3}"
                ));
            }
        }
    }
    let elapsed = started.elapsed();
    let budget = Duration::from_secs(30);
    let ok = violations == 0 && elapsed <= budget;
    report(
        8,
        "multiplexing dominates pointwise",
        ok,
        &format!("0 violations target over 10000 draws, saw {violations}, in {elapsed:?}"),
    );
    assert!(
        violations == 0,
        "expected zero violations, got {violations}, first: {}",
        first.unwrap_or_default()
    );
    assert!(elapsed <= budget, "expected under 30 s, got {elapsed:?}");
}

// ---- 09: phase coherence ----

/// Largest wrapped carrier-phase difference across every antenna of a
/// downlink placement.
fn multi_phase_spread(
    placement: &MultiPlacement,
    layout: &WaveguideLayout,
    user: &UserLocation,
    radio: &RadioConfig,
) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut phases = Vec::new();
    for seg in &placement.segments {
        let feed = layout.feed_x(seg.segment);
        for &x in &seg.positions_m {
            let d = effective_distance(x, user, feed, radio);
            phases.push((radio.wavenumber_rad_per_m * d).rem_euclid(two_pi));
        }
    }
    let first = phases[0];
    let mut min_p = 0.0f64;
    let mut max_p = 0.0f64;
    for &phase in &phases[1..] {
        let mut diff = phase - first;
        if diff > std::f64::consts::PI {
            diff -= two_pi;
        } else if diff < -std::f64::consts::PI {
            diff += two_pi;
        }
        min_p = min_p.min(diff);
        max_p = max_p.max(diff);
    }
    max_p - min_p
}

#[test]
fn a09_aggregation_placements_stay_phase_coherent() {
    let started = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(0xACCE_0009);
    let mut worst_spread = 0.0f64;
    let mut violation: Option<String> = None;
    for i in 0..250 {
        let kappa = rng.gen_range(0.0..0.2);
        let radio = make_radio_config(28.0e9, 1.4, kappa).unwrap();
        let delta = radio.wavelength_m / 2.0;
        let shift_bound = radio.wavelength_m / (radio.n_eff - 1.0) + 1e-9;
        let m = rng.gen_range(2..=48usize);
        let l = rng.gen_range(0.5..2.0);
        let layout = WaveguideLayout::centered(m, l, 0.0, 3.0, delta).unwrap();
        let (lo, hi) = layout.span();
        let u_x = rng.gen_range(lo..hi);
        let u_y = rng.gen_range(-8.0..8.0);
        let user = UserLocation::new(u_x, u_y, &layout);

        let up = sa_place(&user, &layout, &radio).unwrap();
        if !up.events.is_empty() && violation.is_none() {
            violation = Some(format!("iteration {i}: uplink placement clamped"));
        }
        let spread = phase_spread(&up, &layout, &user, &radio);
        worst_spread = worst_spread.max(spread);
        if spread > 1e-6 && violation.is_none() {
            violation = Some(format!("iteration {i}: uplink spread {spread}"));
        }
        for &nu in &up.shifts_m {
            if !(-1e-12..=shift_bound).contains(&nu) && violation.is_none() {
                violation = Some(format!("iteration {i}: uplink shift {nu} m out of range"));
            }
        }

        let counts: Vec<usize> = if i % 2 == 0 {
            vec![1; m]
        } else {
            (0..m).map(|_| rng.gen_range(1..=3usize)).collect()
        };
        let down = dl_place(Protocol::Sa, &user, &layout, &radio, &counts).unwrap();
        if !down.events.is_empty() && violation.is_none() {
            violation = Some(format!("iteration {i}: downlink placement clamped"));
        }
        let spread = multi_phase_spread(&down, &layout, &user, &radio);
        worst_spread = worst_spread.max(spread);
        if spread > 1e-6 && violation.is_none() {
            violation = Some(format!("iteration {i}: downlink spread {spread}"));
        }
        for seg in &down.segments {
            for &nu in &seg.shifts_m {
                if !(-1e-12..=shift_bound).contains(&nu) && violation.is_none() {
                    violation =
                        Some(format!("iteration {i}: downlink shift {nu} m out of range"));
                }
            }
        }
    }
    let elapsed = started.elapsed();
    let budget = Duration::from_secs(10);
    let ok = violation.is_none() && elapsed <= budget;
    report(
        9,
        "aggregation placements stay phase coherent",
        ok,
        &format!("worst wrapped spread {worst_spread:.2e} rad over 250 draws in {elapsed:?}"),
    );
    assert!(
        violation.is_none(),
        "expected coherent bounded placements, got {}",
        violation.unwrap_or_default()
    );
    assert!(elapsed <= budget, "expected under 10 s, got {elapsed:?}");
}

// ---- 10: reciprocity ----

#[test]
fn a10_single_antenna_downlink_reduces_to_the_uplink() {
    let started = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(0xACCE_0010);
    let budget_link = reference_budget();
    let mut worst = (0.0f64, String::new());
    for i in 0..1000 {
        let kappa = if i % 2 == 0 {
            0.0
        } else {
            rng.gen_range(0.0..0.15)
        };
        let radio = make_radio_config(28.0e9, 1.4, kappa).unwrap();
        let delta = radio.wavelength_m / 2.0;
        let m = rng.gen_range(1..=32usize);
        let l = rng.gen_range(0.5..3.0);
        let height = rng.gen_range(2.0..5.0);
        let layout = WaveguideLayout::centered(m, l, 0.0, height, delta).unwrap();
        let (lo, hi) = layout.span();
        let user = UserLocation::new(
            rng.gen_range(lo..hi),
            rng.gen_range(-10.0..10.0),
            &layout,
        );
        let ones = vec![1usize; m];

        let up = ss_place(&user, &layout, &radio, SsPlacementMode::Projection).unwrap();
        let up_ss = ss_snr(&user, &up, &layout, &radio, &budget_link).unwrap().snr;
        let down = dl_place(Protocol::Ss, &user, &layout, &radio, &[1]).unwrap();
        let down_ss = dl_snr(&user, &down, &layout, &radio, &budget_link).unwrap().snr;

        let up = sa_place(&user, &layout, &radio).unwrap();
        let up_sa = sa_snr(&user, &up, &layout, &radio, &budget_link).unwrap().snr;
        let down = dl_place(Protocol::Sa, &user, &layout, &radio, &ones).unwrap();
        let down_sa = dl_snr(&user, &down, &layout, &radio, &budget_link).unwrap().snr;

        let up = sm_place(&user, &layout).unwrap();
        let up_sm = sm_snr(&user, &up, &layout, &radio, &budget_link).unwrap().snr;
        let down = dl_place(Protocol::Sm, &user, &layout, &radio, &ones).unwrap();
        let down_sm = dl_snr(&user, &down, &layout, &radio, &budget_link).unwrap().snr;

        for (name, a, b) in [
            ("selection", up_ss, down_ss),
            ("aggregation", up_sa, down_sa),
            ("multiplexing", up_sm, down_sm),
        ] {
            let rel = rel_gap(a, b);
            if rel > worst.0 {
                worst = (rel, format!("{name} at iteration {i}: {a} vs {b}"));
            }
        }
    }
    let elapsed = started.elapsed();
    let budget = Duration::from_secs(5);
    let ok = worst.0 <= 1e-12 && elapsed <= budget;
    report(
        10,
        "single antenna downlink reduces to the uplink",
        ok,
        &format!("worst rel gap {:.2e} over 1000 draws in {elapsed:?}", worst.0),
    );
    assert!(
        worst.0 <= 1e-12,
        "expected agreement within 1e-12 relative, got {} ({})",
        worst.0,
        worst.1
    );
    assert!(elapsed <= budget, "expected under 5 s, got {elapsed:?}");
}

// ---- 11: downlink selection optimum and rate advantage ----

#[test]
fn a11_selection_downlink_optimum_and_rate_advantage_hold() {
    let started = Instant::now();
    let budget_link = reference_budget();

    // Exact coherent sum on the pitch-Delta alternating geometry the closed
    // form models: one antenna at the projection, then pairs at +-k Delta,
    // compensated summation, argmax tracked incrementally.
    let lossless = lossless_radio();
    let delta = lossless.wavelength_m / 2.0;
    let params = ApproxParams::new(1, 60.0, 9.0, delta).unwrap();
    let ratio = budget_link.power_ratio() * lossless.eta_m2;
    let mut sum = 1.0 / 3.0f64;
    let mut compensation = 0.0f64;
    let mut exact_best = (1usize, ratio * sum * sum);
    let mut approx_best = (
        1usize,
        dl_ss_approx(1, &params, &budget_link, lossless.eta_m2).unwrap(),
    );
    for n in 2..=4200usize {
        let k = (n / 2) as f64;
        let term = 1.0 / (9.0 + (k * delta) * (k * delta)).sqrt();
        let y = term - compensation;
        let t = sum + y;
        compensation = (t - sum) - y;
        sum = t;
        let exact = ratio * sum * sum / n as f64;
        if exact > exact_best.1 {
            exact_best = (n, exact);
        }
        let approx = dl_ss_approx(n, &params, &budget_link, lossless.eta_m2).unwrap();
        if approx > approx_best.1 {
            approx_best = (n, approx);
        }
    }
    let argmax_gap = exact_best.0.abs_diff(approx_best.0);

    // Lossy rate comparison against the single-waveguide baseline using the
    // same per-trial antenna count.
    let radio = lossy_radio();
    let layout = centered_layout(200, 1.0, &radio);
    let single = layout.as_single_waveguide();
    let mut rng = ChaCha12Rng::seed_from_u64(0xACCE_0011);
    let trials = 1000usize;
    let mut swan_rate = 0.0f64;
    let mut pass_rate = 0.0f64;
    for _ in 0..trials {
        let (lo, hi) = layout.span();
        let u_x = rng.gen_range(lo..hi);
        let u_y = rng.gen_range(-10.0..10.0);
        let user = UserLocation::new(u_x, u_y, &layout);
        let dense = dl_place_dense(Protocol::Ss, &user, &layout, &radio).unwrap();
        let n = dense.total_antennas();
        let snr = dl_snr(&user, &dense, &layout, &radio, &budget_link).unwrap().snr;
        swan_rate += (1.0 + snr).log2();
        let baseline = dl_place(Protocol::Ss, &user, &single, &radio, &[n]).unwrap();
        let snr = dl_snr(&user, &baseline, &single, &radio, &budget_link).unwrap().snr;
        pass_rate += (1.0 + snr).log2();
    }
    swan_rate /= trials as f64;
    pass_rate /= trials as f64;

    let elapsed = started.elapsed();
    let budget = Duration::from_secs(60);
    let ok = argmax_gap <= 2 && swan_rate > pass_rate && elapsed <= budget;
    report(
        11,
        "selection downlink optimum and rate advantage",
        ok,
        &format!(
            "argmax N {} vs {}, mean rates {swan_rate:.3} vs {pass_rate:.3} bit/s/Hz, in {elapsed:?}",
            exact_best.0, approx_best.0
        ),
    );
    assert!(
        argmax_gap <= 2,
        "expected the argmax within 2, got exact {} vs approx {}",
        exact_best.0,
        approx_best.0
    );
    assert!(
        swan_rate > pass_rate,
        "expected the segmented mean rate above the baseline, got {swan_rate} vs {pass_rate}"
    );
    assert!(elapsed <= budget, "expected under 60 s, got {elapsed:?}");
}

// ---- 12: uplink mean rate ordering ----

fn rate_sweep_config(lossy: bool) -> ScenarioConfig {
    let radio = lossy_radio();
    ScenarioConfig {
        carrier_freq_hz: 28.0e9,
        n_eff: 1.4,
        kappa_db_per_m: 0.08,
        num_segments: 100,
        segment_length_m: 1.0,
        lateral_offset_m: 0.0,
        height_m: 3.0,
        min_spacing_m: radio.wavelength_m / 2.0,
        tx_power_w: 0.01,
        noise_power_w: 1e-12,
        region_depth_m: 20.0,
        trials: 1000,
        seed: 7,
        direction: Direction::Uplink,
        protocols: vec![Protocol::Ss, Protocol::Sa, Protocol::Sm],
        lossy,
        antennas_per_segment: None,
        include_baselines: true,
        workers: 0,
    }
}

fn mean_rate(result: &SweepResult, value: f64, curve: CurveTag) -> f64 {
    result
        .records
        .iter()
        .find(|r| r.sweep_value == value && r.curve == curve)
        .unwrap_or_else(|| panic!("missing record for {curve} at {value}"))
        .mean_rate_bits
}

#[test]
fn a12_uplink_mean_rates_follow_the_protocol_order() {
    let started = Instant::now();
    let values = [100.0, 200.0];
    let lossy = run_sweep(&rate_sweep_config(true), SweepVariable::Dx, &values).unwrap();
    let lossless = run_sweep(&rate_sweep_config(false), SweepVariable::Dx, &values).unwrap();

    let mut violation: Option<String> = None;
    let mut detail = String::new();
    for &dx in &values {
        let sm = mean_rate(&lossy, dx, CurveTag::Swan(Protocol::Sm));
        let sa = mean_rate(&lossy, dx, CurveTag::Swan(Protocol::Sa));
        let ss = mean_rate(&lossy, dx, CurveTag::Swan(Protocol::Ss));
        let conv = mean_rate(&lossy, dx, CurveTag::Conventional);
        if !(sm >= sa && sa >= ss && ss >= conv) && violation.is_none() {
            violation = Some(format!(
                "order broken at Dx={dx}: sm {sm:.4}, sa {sa:.4}, ss {ss:.4}, conv {conv:.4}"
            ));
        }
        if dx == 200.0 {
            detail = format!("rates at 200 m: {sm:.2} / {sa:.2} / {ss:.2} / {conv:.2}");
        }
        for protocol in [Protocol::Ss, Protocol::Sa, Protocol::Sm] {
            let ideal = mean_rate(&lossless, dx, CurveTag::Swan(protocol));
            let real = mean_rate(&lossy, dx, CurveTag::Swan(protocol));
            if (ideal - real).abs() > 0.02 * ideal && violation.is_none() {
                violation = Some(format!(
                    "loss impact above 2% for {protocol} at Dx={dx}: {real:.4} vs {ideal:.4}"
                ));
            }
        }
    }
    let elapsed = started.elapsed();
    let budget = Duration::from_secs(120);
    let ok = violation.is_none() && elapsed <= budget;
    report(
        12,
        "uplink mean rates follow the protocol order",
        ok,
        &format!("{detail}, in {elapsed:?}"),
    );
    assert!(
        violation.is_none(),
        "expected ordered rates with small loss impact, got {}",
        violation.unwrap_or_default()
    );
    assert!(elapsed <= budget, "expected under 2 min, got {elapsed:?}");
}

// ---- 13: determinism ----

fn run_rate_sweep(dir: &Path, threads: &str) {
    let output = Command::new(env!("CARGO_BIN_EXE_swan"))
        .args(["rate-sweep", "--sweep", "dx", "--values", "50,100", "--out"])
        .arg(dir)
        .env("SWAN_THREADS", threads)
        .output()
        .expect("the sweep binary should start");
    assert!(
        output.status.success(),
        "expected a clean sweep run, got {}: {}",
        output.status,
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn a13_rate_sweep_output_is_byte_identical_across_runs_and_workers() {
    let started = Instant::now();
    let dirs: Vec<tempfile::TempDir> =
        (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    run_rate_sweep(dirs[0].path(), "1");
    run_rate_sweep(dirs[1].path(), "1");
    run_rate_sweep(dirs[2].path(), "4");

    let files = [
        "rate_sweep_swan-ss.csv",
        "rate_sweep_swan-sa.csv",
        "rate_sweep_swan-sm.csv",
        "rate_sweep_conventional.csv",
    ];
    let mut mismatch: Option<String> = None;
    for name in files {
        let reference = std::fs::read(dirs[0].path().join(name)).unwrap();
        for (idx, label) in [(1usize, "a repeated run"), (2, "a four worker run")] {
            let other = std::fs::read(dirs[idx].path().join(name)).unwrap();
            if reference != other && mismatch.is_none() {
                mismatch = Some(format!("{name} differs against {label}"));
            }
        }
    }
    let elapsed = started.elapsed();
    let budget = Duration::from_secs(120);
    let ok = mismatch.is_none() && elapsed <= budget;
    report(
        13,
        "rate sweep output byte identical across runs",
        ok,
        &format!("4 curve files compared across 3 runs in {elapsed:?}"),
    );
    assert!(
        mismatch.is_none(),
        "expected byte identical output, got {}",
        mismatch.unwrap_or_default()
    );
    assert!(elapsed <= budget, "expected under 2 min, got {elapsed:?}");
}
