//! Downlink antenna placement and SNR with multiple antennas per segment.
//!
//! A segment feed radiating through `N` antennas splits its power evenly, so
//! each antenna carries amplitude `1/sqrt(N)`. Within a segment the antennas
//! are phase-aligned, which makes the per-segment beam add coherently at the
//! user:
//!
//! ```text
//! g_m = (1 / sqrt(N_m)) * sum_n h_in(x_mn) * h_out(x_mn)
//! ```
//!
//! Segment selection uses one such beam on the segment nearest the user.
//! Aggregation chains every segment to one source and divides the power
//! again across the `M` feeds, so all antennas align to one global phase
//! reference. Multiplexing drives each segment from its own chain with
//! maximum ratio transmission weights, so only intra-segment alignment is
//! needed. With one antenna per segment each expression reduces to its
//! uplink counterpart.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phys::{
    freespace_coeff, inwaveguide_coeff, nearest_segment, pa_user_distance, LinkBudget, Protocol,
    RadioConfig, UserLocation, WaveguideLayout,
};
use crate::uplink::{
    align_leftward, align_rightward, effective_distance, PlacementEvent, SnrReport,
};

// ---- placement data model ----

/// Antennas of one segment, ascending by position.
#[derive(Debug, Clone)]
pub struct SegmentPlacement {
    /// Segment index (1-based).
    pub segment: usize,
    /// Antenna x positions [m], ascending.
    pub positions_m: Vec<f64>,
    /// Distance each antenna moved from its pre-alignment candidate [m],
    /// same order as the positions.
    pub shifts_m: Vec<f64>,
}

/// Downlink placement across one or more segments.
#[derive(Debug, Clone)]
pub struct MultiPlacement {
    /// Protocol this placement was built for.
    pub protocol: Protocol,
    /// Segment nearest the user, the anchor of the fill (1-based).
    pub selected_segment: Option<usize>,
    /// Per-segment antennas, ascending by segment index.
    pub segments: Vec<SegmentPlacement>,
    /// Clamps encountered while chaining across segments.
    pub events: Vec<PlacementEvent>,
}

impl MultiPlacement {
    /// Total antenna count across all segments.
    pub fn total_antennas(&self) -> usize {
        self.segments.iter().map(|s| s.positions_m.len()).sum()
    }
}

/// Maximum ratio transmission weights for a multiplexing placement.
#[derive(Debug, Clone)]
pub struct MrtWeights {
    /// One complex weight per segment, unit total norm.
    pub weights: Vec<Complex64>,
}

// ---- segment fills ----

fn sort_by_position(mut positions: Vec<f64>, mut shifts: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    let mut order: Vec<usize> = (0..positions.len()).collect();
    order.sort_by(|&i, &j| positions[i].partial_cmp(&positions[j]).unwrap());
    positions = order.iter().map(|&i| positions[i]).collect();
    shifts = order.iter().map(|&i| shifts[i]).collect();
    (positions, shifts)
}

/// Fills a segment around an interior anchor, alternating right and left and
/// starting right. Every antenna after the anchor keeps the minimum spacing
/// from the previous one on its side and is aligned to `ref_dist` modulo the
/// wavelength. A side that would overflow the segment is retired and the
/// remaining antennas go to the other side.
///
/// `limit` of `None` fills to capacity. With a fixed limit that cannot be
/// met the fill reports an infeasible layout.
#[allow(clippy::too_many_arguments)]
fn fill_central(
    anchor_x: f64,
    ref_dist: f64,
    user: &UserLocation,
    feed_x: f64,
    start: f64,
    end: f64,
    spacing: f64,
    limit: Option<usize>,
    radio: &RadioConfig,
    segment: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut positions = vec![anchor_x];
    let mut shifts = vec![0.0];
    let mut right_prev = anchor_x;
    let mut left_prev = anchor_x;
    let mut right_blocked = false;
    let mut left_blocked = false;
    let mut prefer_right = true;
    while limit.is_none_or(|n| positions.len() < n) && !(right_blocked && left_blocked) {
        let go_right = if prefer_right { !right_blocked } else { left_blocked };
        if go_right {
            let candidate = right_prev + spacing;
            if candidate > end {
                right_blocked = true;
                continue;
            }
            let (x, shift) = align_rightward(candidate, ref_dist, user, feed_x, radio)?;
            if x > end {
                right_blocked = true;
                continue;
            }
            positions.push(x);
            shifts.push(shift);
            right_prev = x;
            prefer_right = false;
        } else {
            let candidate = left_prev - spacing;
            if candidate < start {
                left_blocked = true;
                continue;
            }
            let (x, shift) = align_leftward(candidate, ref_dist, user, feed_x, radio)?;
            if x < start {
                left_blocked = true;
                continue;
            }
            positions.push(x);
            shifts.push(shift);
            left_prev = x;
            prefer_right = true;
        }
    }
    if let Some(n) = limit {
        if positions.len() < n {
            return Err(Error::InfeasibleLayout(format!(
                "segment {segment} holds at most {} antennas, {n} requested",
                positions.len()
            )));
        }
    }
    Ok(sort_by_position(positions, shifts))
}

/// Fills a flank segment to the right of the anchor segment. The first
/// antenna keeps the minimum spacing from `entry_x`, the rightmost antenna
/// already placed. With `global_ref` set it is aligned to that reference
/// and clamped to the segment end when alignment overflows; without it the
/// antenna stays put and later antennas align to its own effective distance.
#[allow(clippy::too_many_arguments)]
fn fill_flank_rightward(
    entry_x: f64,
    global_ref: Option<f64>,
    user: &UserLocation,
    feed_x: f64,
    start: f64,
    end: f64,
    spacing: f64,
    limit: Option<usize>,
    radio: &RadioConfig,
    segment: usize,
    events: &mut Vec<PlacementEvent>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let candidate = start.max(entry_x + spacing);
    let (anchor, anchor_shift) = match global_ref {
        Some(ref_dist) => {
            let (mut x, mut shift) = align_rightward(candidate, ref_dist, user, feed_x, radio)?;
            if x > end {
                x = end;
                shift = (x - candidate).max(0.0);
                events.push(PlacementEvent::Clamped { segment });
            }
            (x, shift)
        }
        None => (candidate, 0.0),
    };
    let ref_dist = global_ref.unwrap_or_else(|| effective_distance(anchor, user, feed_x, radio));
    let mut positions = vec![anchor];
    let mut shifts = vec![anchor_shift];
    let mut prev = anchor;
    while limit.is_none_or(|n| positions.len() < n) {
        let candidate = prev + spacing;
        if candidate > end {
            break;
        }
        let (x, shift) = align_rightward(candidate, ref_dist, user, feed_x, radio)?;
        if x > end {
            break;
        }
        positions.push(x);
        shifts.push(shift);
        prev = x;
    }
    if let Some(n) = limit {
        if positions.len() < n {
            return Err(Error::InfeasibleLayout(format!(
                "segment {segment} holds at most {} antennas, {n} requested",
                positions.len()
            )));
        }
    }
    Ok((positions, shifts))
}

/// Mirror of [`fill_flank_rightward`] for segments left of the anchor.
/// Returned antennas ascend by position like every other fill.
#[allow(clippy::too_many_arguments)]
fn fill_flank_leftward(
    entry_x: f64,
    global_ref: Option<f64>,
    user: &UserLocation,
    feed_x: f64,
    start: f64,
    end: f64,
    spacing: f64,
    limit: Option<usize>,
    radio: &RadioConfig,
    segment: usize,
    events: &mut Vec<PlacementEvent>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let candidate = end.min(entry_x - spacing);
    let (anchor, anchor_shift) = match global_ref {
        Some(ref_dist) => {
            let (mut x, mut shift) = align_leftward(candidate, ref_dist, user, feed_x, radio)?;
            if x < start {
                x = start;
                shift = (candidate - x).max(0.0);
                events.push(PlacementEvent::Clamped { segment });
            }
            (x, shift)
        }
        None => (candidate, 0.0),
    };
    let ref_dist = global_ref.unwrap_or_else(|| effective_distance(anchor, user, feed_x, radio));
    let mut positions = vec![anchor];
    let mut shifts = vec![anchor_shift];
    let mut prev = anchor;
    while limit.is_none_or(|n| positions.len() < n) {
        let candidate = prev - spacing;
        if candidate < start {
            break;
        }
        let (x, shift) = align_leftward(candidate, ref_dist, user, feed_x, radio)?;
        if x < start {
            break;
        }
        positions.push(x);
        shifts.push(shift);
        prev = x;
    }
    if let Some(n) = limit {
        if positions.len() < n {
            return Err(Error::InfeasibleLayout(format!(
                "segment {segment} holds at most {} antennas, {n} requested",
                positions.len()
            )));
        }
    }
    positions.reverse();
    shifts.reverse();
    Ok((positions, shifts))
}

// ---- placement entry points ----

fn validate_counts(
    protocol: Protocol,
    layout: &WaveguideLayout,
    counts: &[usize],
) -> Result<()> {
    match protocol {
        Protocol::Ss => {
            if counts.len() != 1 {
                return Err(Error::InvalidArgument(format!(
                    "selection placement takes one antenna count, got {}",
                    counts.len()
                )));
            }
        }
        Protocol::Sa | Protocol::Sm => {
            if counts.len() != layout.num_segments {
                return Err(Error::InvalidArgument(format!(
                    "expected one antenna count per segment ({}), got {}",
                    layout.num_segments,
                    counts.len()
                )));
            }
        }
    }
    if counts.contains(&0) {
        return Err(Error::InvalidArgument(
            "every requested antenna count must be at least 1".to_string(),
        ));
    }
    Ok(())
}

fn place_impl(
    protocol: Protocol,
    user: &UserLocation,
    layout: &WaveguideLayout,
    radio: &RadioConfig,
    counts: Option<&[usize]>,
) -> Result<MultiPlacement> {
    if let Some(counts) = counts {
        validate_counts(protocol, layout, counts)?;
    }
    let m_star = nearest_segment(user.u_x_m, layout)?;
    let spacing = layout.min_spacing_m;
    let anchor_feed = layout.feed_x(m_star);
    let global_ref = effective_distance(user.u_x_m, user, anchor_feed, radio);
    let limit_for = |m: usize| -> Option<usize> {
        counts.map(|c| match protocol {
            Protocol::Ss => c[0],
            _ => c[m - 1],
        })
    };

    let mut events = Vec::new();
    let (central_pos, central_shifts) = fill_central(
        user.u_x_m,
        global_ref,
        user,
        anchor_feed,
        layout.segment_start(m_star),
        layout.segment_end(m_star),
        spacing,
        limit_for(m_star),
        radio,
        m_star,
    )?;

    if protocol == Protocol::Ss {
        return Ok(MultiPlacement {
            protocol,
            selected_segment: Some(m_star),
            segments: vec![SegmentPlacement {
                segment: m_star,
                positions_m: central_pos,
                shifts_m: central_shifts,
            }],
            events,
        });
    }

    if layout.segment_length_m <= spacing {
        return Err(Error::InfeasibleLayout(format!(
            "segment length {} m must exceed the antenna spacing {} m",
            layout.segment_length_m, spacing
        )));
    }

    let flank_ref = match protocol {
        Protocol::Sa => Some(global_ref),
        _ => None,
    };
    let mut filled: Vec<Option<SegmentPlacement>> = vec![None; layout.num_segments];
    let mut rightmost = *central_pos.last().expect("central fill is never empty");
    let mut leftmost = central_pos[0];
    filled[m_star - 1] = Some(SegmentPlacement {
        segment: m_star,
        positions_m: central_pos,
        shifts_m: central_shifts,
    });

    for m in (m_star + 1)..=layout.num_segments {
        let (positions, shifts) = fill_flank_rightward(
            rightmost,
            flank_ref,
            user,
            layout.feed_x(m),
            layout.segment_start(m),
            layout.segment_end(m),
            spacing,
            limit_for(m),
            radio,
            m,
            &mut events,
        )?;
        rightmost = *positions.last().expect("flank fill is never empty");
        filled[m - 1] = Some(SegmentPlacement {
            segment: m,
            positions_m: positions,
            shifts_m: shifts,
        });
    }
    for m in (1..m_star).rev() {
        let (positions, shifts) = fill_flank_leftward(
            leftmost,
            flank_ref,
            user,
            layout.feed_x(m),
            layout.segment_start(m),
            layout.segment_end(m),
            spacing,
            limit_for(m),
            radio,
            m,
            &mut events,
        )?;
        leftmost = positions[0];
        filled[m - 1] = Some(SegmentPlacement {
            segment: m,
            positions_m: positions,
            shifts_m: shifts,
        });
    }

    Ok(MultiPlacement {
        protocol,
        selected_segment: Some(m_star),
        segments: filled.into_iter().map(|s| s.expect("all filled")).collect(),
        events,
    })
}

/// Places a fixed number of antennas per segment for the downlink.
///
/// For segment selection `counts` holds a single entry, the antenna count in
/// the segment nearest the user. For aggregation and multiplexing it holds
/// one entry per segment. Counts that do not fit produce an infeasible
/// layout error.
pub fn dl_place(
    protocol: Protocol,
    user: &UserLocation,
    layout: &WaveguideLayout,
    radio: &RadioConfig,
    counts: &[usize],
) -> Result<MultiPlacement> {
    place_impl(protocol, user, layout, radio, Some(counts))
}

/// Places as many antennas as the geometry admits, greedily, honoring the
/// minimum spacing. Aligned antennas land on a pitch between the minimum
/// spacing and one alignment period above it, so the achieved count is what
/// the greedy fill reaches, not a closed-form capacity.
pub fn dl_place_dense(
    protocol: Protocol,
    user: &UserLocation,
    layout: &WaveguideLayout,
    radio: &RadioConfig,
) -> Result<MultiPlacement> {
    place_impl(protocol, user, layout, radio, None)
}

// ---- SNR ----

/// Per-segment beam coefficient with the even power split folded in.
fn segment_beam(
    seg: &SegmentPlacement,
    user: &UserLocation,
    layout: &WaveguideLayout,
    radio: &RadioConfig,
) -> Complex64 {
    let feed = layout.feed_x(seg.segment);
    let sum: Complex64 = seg
        .positions_m
        .iter()
        .map(|&x| inwaveguide_coeff(x, feed, radio) * freespace_coeff(user, x, radio))
        .sum();
    sum / (seg.positions_m.len() as f64).sqrt()
}

/// Lossless unit-amplitude beam, path gain constant factored out.
fn segment_beam_unit(
    seg: &SegmentPlacement,
    user: &UserLocation,
    layout: &WaveguideLayout,
    radio: &RadioConfig,
) -> Complex64 {
    let feed = layout.feed_x(seg.segment);
    let sum: Complex64 = seg
        .positions_m
        .iter()
        .map(|&x| {
            let r = pa_user_distance(user, x);
            let d = effective_distance(x, user, feed, radio);
            Complex64::from_polar(1.0 / r, -radio.wavenumber_rad_per_m * d)
        })
        .sum();
    sum / (seg.positions_m.len() as f64).sqrt()
}

fn check_placement(placement: &MultiPlacement, layout: &WaveguideLayout) -> Result<()> {
    if placement.segments.is_empty() {
        return Err(Error::InvalidArgument(
            "placement holds no segments".to_string(),
        ));
    }
    for seg in &placement.segments {
        if seg.segment == 0 || seg.segment > layout.num_segments {
            return Err(Error::OutOfRange(format!(
                "segment index {} outside 1..={}",
                seg.segment, layout.num_segments
            )));
        }
        if seg.positions_m.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "segment {} holds no antennas",
                seg.segment
            )));
        }
    }
    if placement.protocol == Protocol::Ss && placement.segments.len() != 1 {
        return Err(Error::InvalidArgument(
            "selection placement must hold exactly one segment".to_string(),
        ));
    }
    Ok(())
}

/// Downlink SNR for any placement. Selection uses the single beam directly,
/// aggregation sums the beams coherently and splits power across the active
/// segments, multiplexing adds beam powers under maximum ratio transmission.
/// The placement may carry any active-segment subset, the noise and power
/// split follow the subset size.
pub fn dl_snr(
    user: &UserLocation,
    placement: &MultiPlacement,
    layout: &WaveguideLayout,
    radio: &RadioConfig,
    budget: &LinkBudget,
) -> Result<SnrReport> {
    check_placement(placement, layout)?;
    let beams: Vec<Complex64> = placement
        .segments
        .iter()
        .map(|s| segment_beam(s, user, layout, radio))
        .collect();
    let lossless = radio.kappa_db_per_m == 0.0;
    let units: Vec<Complex64> = if lossless {
        Vec::new()
    } else {
        placement
            .segments
            .iter()
            .map(|s| segment_beam_unit(s, user, layout, radio))
            .collect()
    };
    let (power, unit_power, noise_scale) = match placement.protocol {
        Protocol::Ss => {
            let p = beams[0].norm_sqr();
            let u = if lossless { 0.0 } else { units[0].norm_sqr() };
            (p, u, 1.0)
        }
        Protocol::Sa => {
            let total: Complex64 = beams.iter().sum();
            let u = if lossless {
                0.0
            } else {
                units.iter().sum::<Complex64>().norm_sqr()
            };
            (total.norm_sqr(), u, placement.segments.len() as f64)
        }
        Protocol::Sm => {
            let p = beams.iter().map(|b| b.norm_sqr()).sum();
            let u = if lossless {
                0.0
            } else {
                units.iter().map(|b| b.norm_sqr()).sum()
            };
            (p, u, 1.0)
        }
    };
    let (freespace, waveguide_gain) = if lossless {
        (power / radio.eta_m2, 1.0)
    } else {
        let gain = if unit_power > 0.0 {
            power / (radio.eta_m2 * unit_power)
        } else {
            0.0
        };
        (unit_power, gain)
    };
    Ok(SnrReport {
        protocol: placement.protocol,
        snr: budget.power_ratio() * power / noise_scale,
        freespace_term_per_m2: freespace,
        waveguide_gain,
        noise_scale,
    })
}

/// Maximum ratio transmission weights across the per-segment chains of a
/// multiplexing placement. The weights have unit total norm and steer the
/// transmit power so the received beams add in phase, achieving the SNR
/// reported by [`dl_snr`].
pub fn mrt_weights(
    user: &UserLocation,
    placement: &MultiPlacement,
    layout: &WaveguideLayout,
    radio: &RadioConfig,
) -> Result<MrtWeights> {
    if placement.protocol != Protocol::Sm {
        return Err(Error::InvalidArgument(
            "ratio transmission weights are only defined for multiplexing placements".to_string(),
        ));
    }
    check_placement(placement, layout)?;
    let beams: Vec<Complex64> = placement
        .segments
        .iter()
        .map(|s| segment_beam(s, user, layout, radio))
        .collect();
    let norm = beams.iter().map(|b| b.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::NumericDomain(
            "all beams vanished, weights undefined".to_string(),
        ));
    }
    Ok(MrtWeights {
        weights: beams.iter().map(|b| b.conj() / norm).collect(),
    })
}
