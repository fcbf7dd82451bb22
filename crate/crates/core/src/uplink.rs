//! Uplink antenna placement and SNR for the three activation protocols.
//!
//! Every segment hosts one antenna. The signal observed at the feed of
//! segment `m` carries the total phase `k0 * d_m` where
//!
//! ```text
//! d_m(x) = sqrt((u_x - x)^2 + c_y) + n_eff * (x - feed_m)
//! ```
//!
//! is the effective propagation distance through free space and dielectric.
//! Segment selection places one antenna in the segment nearest the user,
//! trading in-waveguide loss against free-space spreading in closed form.
//! Segment aggregation sweeps antennas outward from the user's projection,
//! shifting each a fraction of a wavelength so all effective distances are
//! congruent modulo `lambda`, which makes the aggregate sum coherent.
//! Segment multiplexing uses the same sweep without shifts because ratio
//! combining is phase-insensitive.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phys::{
    freespace_coeff, inwaveguide_coeff, nearest_segment, pa_user_distance, LinkBudget, Protocol,
    RadioConfig, UserLocation, WaveguideLayout,
};

// ---- placement data model ----

/// Noteworthy conditions recorded during placement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlacementEvent {
    /// An aligned position overflowed its segment and was clamped to the
    /// boundary, breaking phase coherence for that antenna.
    Clamped { segment: usize },
    /// The closed-form branch test for segment selection was degenerate, the
    /// feed placement branch was taken.
    DegenerateBranch { segment: usize },
}

/// How segment selection positions its single antenna.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsPlacementMode {
    /// Closed-form optimum trading waveguide loss against path loss.
    Exact,
    /// Orthogonal projection of the user onto the waveguide axis.
    Projection,
}

/// One antenna per active segment.
#[derive(Debug, Clone)]
pub struct Placement {
    /// Protocol this placement was built for.
    pub protocol: Protocol,
    /// Segment nearest the user, the anchor of the sweep (1-based).
    pub selected_segment: Option<usize>,
    /// Active segment indices in ascending order (1-based).
    pub active_segments: Vec<usize>,
    /// Antenna x positions [m], one per active segment, same order.
    pub positions_m: Vec<f64>,
    /// Distance each antenna moved from its pre-alignment candidate [m].
    pub shifts_m: Vec<f64>,
    /// Clamps and degenerate branches encountered.
    pub events: Vec<PlacementEvent>,
}

/// SNR decomposition common to every protocol.
///
/// The identity `snr = (P / sigma^2) * eta * freespace_term * waveguide_gain
/// / noise_scale` holds exactly. The free-space term aggregates the lossless
/// `1/r` channel (with combining weights folded in), the waveguide gain is
/// the ratio of the lossy aggregate to the lossless one and equals 1 when
/// the loss rate is zero.
#[derive(Debug, Clone, Copy)]
pub struct SnrReport {
    /// Protocol that produced this value.
    pub protocol: Protocol,
    /// Linear SNR.
    pub snr: f64,
    /// Lossless aggregate free-space term [1/m^2].
    pub freespace_term_per_m2: f64,
    /// Lossy-to-lossless power ratio, 1 when the waveguide is lossless.
    pub waveguide_gain: f64,
    /// Noise multiplier, the active segment count for aggregation and 1
    /// otherwise.
    pub noise_scale: f64,
}

// ---- effective distance and phase alignment ----

/// Effective propagation distance from the user through an antenna at
/// `pa_x` to the feed at `feed_x` [m]. Free space counts once, dielectric
/// counts `n_eff` times.
pub fn effective_distance(
    pa_x_m: f64,
    user: &UserLocation,
    feed_x_m: f64,
    radio: &RadioConfig,
) -> f64 {
    pa_user_distance(user, pa_x_m) + radio.n_eff * (pa_x_m - feed_x_m)
}

/// Solves `effective_distance(x) == target` for `x`.
///
/// The effective distance is strictly increasing in `x` with slope at least
/// `n_eff - 1`, so the solution is unique. The closed form takes the smaller
/// root of the squared equation, which is the one satisfying the original
/// unsquared constraint on both sides of the user.
fn solve_effective_distance(
    target_m: f64,
    user: &UserLocation,
    feed_x_m: f64,
    radio: &RadioConfig,
) -> Result<f64> {
    let n = radio.n_eff;
    let a = user.u_x_m - feed_x_m;
    let c = user.c_y_m2;
    let t = target_m;
    let x = if n == 1.0 {
        let denom = 2.0 * (t - a);
        if denom <= 0.0 {
            return Err(Error::NumericDomain(format!(
                "alignment target {t} m is below the reachable distance range"
            )));
        }
        feed_x_m + (t * t - a * a - c) / denom
    } else {
        let disc = n * n * a * a - 2.0 * a * n * t + t * t + (n * n - 1.0) * c;
        if disc < 0.0 {
            return Err(Error::NumericDomain(format!(
                "negative discriminant {disc} while aligning to {t} m"
            )));
        }
        (feed_x_m * n * n + t * n - user.u_x_m - disc.sqrt()) / (n * n - 1.0)
    };
    debug_assert!(
        (effective_distance(x, user, feed_x_m, radio) - t).abs() <= 1e-9 * t.abs().max(1.0),
        "closed-form alignment residual too large"
    );
    Ok(x)
}

/// Shift that moves an antenna at `anchor_pos` rightward until its effective
/// distance reaches `target_dist` [m]. The target must not be below the
/// current effective distance.
///
/// The returned shift is non-negative and, when the target is within one
/// wavelength of the current distance, bounded by
/// `lambda / (n_eff - 1)`.
pub fn phase_align_shift(
    anchor_pos_m: f64,
    feed_x_m: f64,
    user: &UserLocation,
    radio: &RadioConfig,
    target_dist_m: f64,
) -> Result<f64> {
    let current = effective_distance(anchor_pos_m, user, feed_x_m, radio);
    if target_dist_m < current - 1e-9 * current.abs().max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "target distance {target_dist_m} m is below the current {current} m"
        )));
    }
    let x = solve_effective_distance(target_dist_m, user, feed_x_m, radio)?;
    Ok((x - anchor_pos_m).max(0.0))
}

/// Moves `candidate_x` rightward to the nearest position whose effective
/// distance is congruent to `ref_dist` modulo the wavelength. Returns the
/// aligned position and the applied shift.
pub(crate) fn align_rightward(
    candidate_x_m: f64,
    ref_dist_m: f64,
    user: &UserLocation,
    feed_x_m: f64,
    radio: &RadioConfig,
) -> Result<(f64, f64)> {
    let d_here = effective_distance(candidate_x_m, user, feed_x_m, radio);
    let advance = (ref_dist_m - d_here).rem_euclid(radio.wavelength_m);
    if advance == 0.0 {
        return Ok((candidate_x_m, 0.0));
    }
    let x = solve_effective_distance(d_here + advance, user, feed_x_m, radio)?;
    Ok((x, (x - candidate_x_m).max(0.0)))
}

/// Moves `candidate_x` leftward to the nearest position whose effective
/// distance is congruent to `ref_dist` modulo the wavelength. Returns the
/// aligned position and the applied shift magnitude.
pub(crate) fn align_leftward(
    candidate_x_m: f64,
    ref_dist_m: f64,
    user: &UserLocation,
    feed_x_m: f64,
    radio: &RadioConfig,
) -> Result<(f64, f64)> {
    let d_here = effective_distance(candidate_x_m, user, feed_x_m, radio);
    let retreat = (d_here - ref_dist_m).rem_euclid(radio.wavelength_m);
    if retreat == 0.0 {
        return Ok((candidate_x_m, 0.0));
    }
    let x = solve_effective_distance(d_here - retreat, user, feed_x_m, radio)?;
    Ok((x, (candidate_x_m - x).max(0.0)))
}

/// Largest wrapped difference between the carrier phases observed at the
/// segment feeds [rad]. Zero means perfectly coherent aggregation.
pub fn phase_spread(
    placement: &Placement,
    layout: &WaveguideLayout,
    user: &UserLocation,
    radio: &RadioConfig,
) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let phases: Vec<f64> = placement
        .active_segments
        .iter()
        .zip(&placement.positions_m)
        .map(|(&m, &x)| {
            let d = effective_distance(x, user, layout.feed_x(m), radio);
            (radio.wavenumber_rad_per_m * d).rem_euclid(two_pi)
        })
        .collect();
    let Some(&first) = phases.first() else {
        return 0.0;
    };
    // Differences are wrapped relative to the first phase so a coherent
    // cluster straddling 0 does not read as a full-circle spread.
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

// ---- segment selection ----

/// Places the single antenna for segment selection.
///
/// In exact mode with a lossy waveguide the antenna sits at the segment feed
/// when the cross-axis distance dominates, otherwise at the interior point
/// where marginal waveguide loss balances marginal path loss. With a
/// lossless waveguide, or in projection mode, the antenna sits directly
/// under the user.
pub fn ss_place(
    user: &UserLocation,
    layout: &WaveguideLayout,
    radio: &RadioConfig,
    mode: SsPlacementMode,
) -> Result<Placement> {
    let m = nearest_segment(user.u_x_m, layout)?;
    let feed = layout.feed_x(m);
    let start = layout.segment_start(m);
    let end = layout.segment_end(m);
    let mut events = Vec::new();
    let alpha = radio.alpha_per_m;
    let raw = match mode {
        SsPlacementMode::Projection => user.u_x_m,
        SsPlacementMode::Exact => {
            if alpha == 0.0 {
                user.u_x_m
            } else {
                let local_x = user.u_x_m - feed;
                let branch = 2.0 * alpha * local_x - 1.0;
                if branch.abs() > 1.0 {
                    events.push(PlacementEvent::DegenerateBranch { segment: m });
                }
                let feed_threshold = (1.0 - branch * branch) / (4.0 * alpha * alpha);
                if user.c_y_m2 >= feed_threshold {
                    feed
                } else {
                    // The square root is real here because the branch above
                    // already captured c_y >= 1 / (4 alpha^2).
                    let root = (1.0 - 4.0 * alpha * alpha * user.c_y_m2).sqrt();
                    user.u_x_m + (-1.0 + root) / (2.0 * alpha)
                }
            }
        }
    };
    let position = if raw < start {
        events.push(PlacementEvent::Clamped { segment: m });
        start
    } else if raw > end {
        events.push(PlacementEvent::Clamped { segment: m });
        end
    } else {
        raw
    };
    Ok(Placement {
        protocol: Protocol::Ss,
        selected_segment: Some(m),
        active_segments: vec![m],
        positions_m: vec![position],
        shifts_m: vec![0.0],
        events,
    })
}

/// Uplink SNR for a segment selection placement.
pub fn ss_snr(
    user: &UserLocation,
    placement: &Placement,
    layout: &WaveguideLayout,
    radio: &RadioConfig,
    budget: &LinkBudget,
) -> Result<SnrReport> {
    if placement.protocol != Protocol::Ss || placement.positions_m.len() != 1 {
        return Err(Error::InvalidArgument(
            "segment selection SNR needs a single-antenna selection placement".to_string(),
        ));
    }
    let m = placement.selected_segment.ok_or_else(|| {
        Error::InvalidArgument("selection placement is missing its segment".to_string())
    })?;
    let x = placement.positions_m[0];
    let r = pa_user_distance(user, x);
    let d_in = (x - layout.feed_x(m)).abs();
    let loss = 10f64.powf(-radio.kappa_db_per_m * d_in / 10.0);
    let freespace = 1.0 / (r * r);
    let snr = budget.power_ratio() * radio.eta_m2 * freespace * loss;
    Ok(SnrReport {
        protocol: Protocol::Ss,
        snr,
        freespace_term_per_m2: freespace,
        waveguide_gain: loss,
        noise_scale: 1.0,
    })
}

/// Uplink SNR of the conventional single-waveguide baseline: one antenna at
/// the user's projection on a waveguide spanning the full layout, fed from
/// the left end.
pub fn conventional_uplink_snr(
    user: &UserLocation,
    layout: &WaveguideLayout,
    radio: &RadioConfig,
    budget: &LinkBudget,
) -> Result<SnrReport> {
    let (lo, hi) = layout.span();
    if user.u_x_m < lo || user.u_x_m > hi {
        return Err(Error::OutOfRange(format!(
            "user x = {} m is outside the served span [{lo}, {hi}] m",
            user.u_x_m
        )));
    }
    let d_in = user.u_x_m - lo;
    let loss = 10f64.powf(-radio.kappa_db_per_m * d_in / 10.0);
    let freespace = 1.0 / user.c_y_m2;
    let snr = budget.power_ratio() * radio.eta_m2 * freespace * loss;
    Ok(SnrReport {
        protocol: Protocol::Ss,
        snr,
        freespace_term_per_m2: freespace,
        waveguide_gain: loss,
        noise_scale: 1.0,
    })
}

// ---- aggregation and multiplexing sweeps ----

fn require_segment_headroom(layout: &WaveguideLayout) -> Result<()> {
    if layout.segment_length_m <= layout.min_spacing_m {
        return Err(Error::InfeasibleLayout(format!(
            "segment length {} m must exceed the antenna spacing {} m",
            layout.segment_length_m, layout.min_spacing_m
        )));
    }
    Ok(())
}

/// Places one antenna per segment for segment aggregation.
///
/// The anchor sits at the user's projection inside the nearest segment. The
/// sweep then moves outward segment by segment: each candidate keeps the
/// minimum spacing from the previous antenna and is shifted away from the
/// user until its effective distance matches the anchor's modulo the
/// wavelength. Aligned positions that overflow their segment are clamped to
/// the boundary and flagged.
pub fn sa_place(
    user: &UserLocation,
    layout: &WaveguideLayout,
    radio: &RadioConfig,
) -> Result<Placement> {
    require_segment_headroom(layout)?;
    let m_star = nearest_segment(user.u_x_m, layout)?;
    let m_total = layout.num_segments;
    let delta = layout.min_spacing_m;
    let ref_dist = effective_distance(user.u_x_m, user, layout.feed_x(m_star), radio);

    let mut positions = vec![0.0; m_total];
    let mut shifts = vec![0.0; m_total];
    let mut events = Vec::new();
    positions[m_star - 1] = user.u_x_m;

    let mut prev = user.u_x_m;
    for m in (m_star + 1)..=m_total {
        let candidate = layout.segment_start(m).max(prev + delta);
        let (mut x, mut shift) = align_rightward(candidate, ref_dist, user, layout.feed_x(m), radio)?;
        let end = layout.segment_end(m);
        if x > end {
            x = end;
            shift = (x - candidate).max(0.0);
            events.push(PlacementEvent::Clamped { segment: m });
        }
        positions[m - 1] = x;
        shifts[m - 1] = shift;
        prev = x;
    }

    prev = user.u_x_m;
    for m in (1..m_star).rev() {
        let candidate = layout.segment_end(m).min(prev - delta);
        let (mut x, mut shift) = align_leftward(candidate, ref_dist, user, layout.feed_x(m), radio)?;
        let start = layout.segment_start(m);
        if x < start {
            x = start;
            shift = (candidate - x).max(0.0);
            events.push(PlacementEvent::Clamped { segment: m });
        }
        positions[m - 1] = x;
        shifts[m - 1] = shift;
        prev = x;
    }

    Ok(Placement {
        protocol: Protocol::Sa,
        selected_segment: Some(m_star),
        active_segments: (1..=m_total).collect(),
        positions_m: positions,
        shifts_m: shifts,
        events,
    })
}

/// Places one antenna per segment for segment multiplexing. Same outward
/// sweep as aggregation but without phase shifts, since ratio combining does
/// not need coherent feeds. The waveguide properties therefore do not enter.
pub fn sm_place(user: &UserLocation, layout: &WaveguideLayout) -> Result<Placement> {
    require_segment_headroom(layout)?;
    let m_star = nearest_segment(user.u_x_m, layout)?;
    let m_total = layout.num_segments;
    let delta = layout.min_spacing_m;

    let mut positions = vec![0.0; m_total];
    positions[m_star - 1] = user.u_x_m;
    let mut prev = user.u_x_m;
    for m in (m_star + 1)..=m_total {
        let x = layout.segment_start(m).max(prev + delta);
        positions[m - 1] = x;
        prev = x;
    }
    prev = user.u_x_m;
    for m in (1..m_star).rev() {
        let x = layout.segment_end(m).min(prev - delta);
        positions[m - 1] = x;
        prev = x;
    }

    Ok(Placement {
        protocol: Protocol::Sm,
        selected_segment: Some(m_star),
        active_segments: (1..=m_total).collect(),
        positions_m: positions,
        shifts_m: vec![0.0; m_total],
        events: Vec::new(),
    })
}

fn check_multi_segment_placement(placement: &Placement, expected: Protocol) -> Result<()> {
    if placement.protocol != expected {
        return Err(Error::InvalidArgument(format!(
            "placement was built for {} but evaluated as {}",
            placement.protocol, expected
        )));
    }
    if placement.positions_m.len() != placement.active_segments.len()
        || placement.active_segments.is_empty()
    {
        return Err(Error::InvalidArgument(
            "placement must carry one antenna per active segment".to_string(),
        ));
    }
    Ok(())
}

/// Per-segment end-to-end coefficients, in-waveguide times free-space.
fn segment_coeffs(
    user: &UserLocation,
    placement: &Placement,
    layout: &WaveguideLayout,
    radio: &RadioConfig,
) -> Vec<Complex64> {
    placement
        .active_segments
        .iter()
        .zip(&placement.positions_m)
        .map(|(&m, &x)| {
            inwaveguide_coeff(x, layout.feed_x(m), radio) * freespace_coeff(user, x, radio)
        })
        .collect()
}

/// Lossless unit-amplitude version of the per-segment coefficients, with the
/// path gain constant factored out.
fn segment_units(
    user: &UserLocation,
    placement: &Placement,
    layout: &WaveguideLayout,
    radio: &RadioConfig,
) -> Vec<Complex64> {
    placement
        .active_segments
        .iter()
        .zip(&placement.positions_m)
        .map(|(&m, &x)| {
            let r = pa_user_distance(user, x);
            let d = effective_distance(x, user, layout.feed_x(m), radio);
            Complex64::from_polar(1.0 / r, -radio.wavenumber_rad_per_m * d)
        })
        .collect()
}

/// Uplink SNR for segment aggregation: all feeds sum into one receive chain,
/// so the noise scales with the segment count.
pub fn sa_snr(
    user: &UserLocation,
    placement: &Placement,
    layout: &WaveguideLayout,
    radio: &RadioConfig,
    budget: &LinkBudget,
) -> Result<SnrReport> {
    check_multi_segment_placement(placement, Protocol::Sa)?;
    let aggregate: Complex64 = segment_coeffs(user, placement, layout, radio).iter().sum();
    let power = aggregate.norm_sqr();
    let noise_scale = placement.active_segments.len() as f64;
    let (freespace, waveguide_gain) = if radio.kappa_db_per_m == 0.0 {
        (power / radio.eta_m2, 1.0)
    } else {
        let unit: Complex64 = segment_units(user, placement, layout, radio).iter().sum();
        let lossless = unit.norm_sqr();
        let gain = if lossless > 0.0 {
            power / (radio.eta_m2 * lossless)
        } else {
            0.0
        };
        (lossless, gain)
    };
    Ok(SnrReport {
        protocol: Protocol::Sa,
        snr: budget.power_ratio() * power / noise_scale,
        freespace_term_per_m2: freespace,
        waveguide_gain,
        noise_scale,
    })
}

/// Uplink SNR for segment multiplexing with maximum ratio combining across
/// the per-segment chains.
pub fn sm_snr(
    user: &UserLocation,
    placement: &Placement,
    layout: &WaveguideLayout,
    radio: &RadioConfig,
    budget: &LinkBudget,
) -> Result<SnrReport> {
    check_multi_segment_placement(placement, Protocol::Sm)?;
    let power: f64 = segment_coeffs(user, placement, layout, radio)
        .iter()
        .map(|h| h.norm_sqr())
        .sum();
    let (freespace, waveguide_gain) = if radio.kappa_db_per_m == 0.0 {
        (power / radio.eta_m2, 1.0)
    } else {
        let lossless: f64 = segment_units(user, placement, layout, radio)
            .iter()
            .map(|u| u.norm_sqr())
            .sum();
        let gain = if lossless > 0.0 {
            power / (radio.eta_m2 * lossless)
        } else {
            0.0
        };
        (lossless, gain)
    };
    Ok(SnrReport {
        protocol: Protocol::Sm,
        snr: budget.power_ratio() * power,
        freespace_term_per_m2: freespace,
        waveguide_gain,
        noise_scale: 1.0,
    })
}
