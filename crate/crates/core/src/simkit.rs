//! Deterministic Monte Carlo harness for rate and SNR sweeps.
//!
//! A scenario fixes the radio, geometry, budget, protocol set, and trial
//! count. A sweep varies one quantity (span, segment count, segment length,
//! or antennas per segment) and reruns the same paired trials at every
//! value: each trial draws one user position and scores every requested
//! protocol plus the conventional single-waveguide baselines on it.
//!
//! Reproducibility is bit-exact and independent of the worker count. Every
//! trial seeds its own counter-based random stream from the master seed, the
//! trial outputs are collected by index, and the reduction runs in a fixed
//! order, so neither thread scheduling nor partitioning can reorder floating
//! point operations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::downlink::{dl_place, dl_place_dense, dl_snr};
use crate::error::{Error, Result};
use crate::phys::{
    make_radio_config, LinkBudget, Protocol, RadioConfig, UserLocation, WaveguideLayout,
};
use crate::uplink::{
    conventional_uplink_snr, sa_place, sa_snr, sm_place, sm_snr, ss_place, ss_snr,
    SsPlacementMode,
};

// ---- scenario configuration ----

/// Link direction of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Uplink,
    Downlink,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Direction::Uplink => write!(f, "uplink"),
            Direction::Downlink => write!(f, "downlink"),
        }
    }
}

/// Everything a sweep needs besides the swept variable.
///
/// The layout is always centered on the origin, the first feed sits at
/// `-L M / 2`. Users are drawn uniformly over the served span crossed with
/// the region depth.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// Carrier frequency [Hz].
    pub carrier_freq_hz: f64,
    /// Effective refractive index of the waveguide.
    pub n_eff: f64,
    /// In-waveguide loss [dB/m], applied only when `lossy` is true.
    pub kappa_db_per_m: f64,
    /// Segment count `M`.
    pub num_segments: usize,
    /// Segment length `L` [m].
    pub segment_length_m: f64,
    /// Lateral offset of the waveguide [m].
    pub lateral_offset_m: f64,
    /// Waveguide height above the user plane [m].
    pub height_m: f64,
    /// Minimum antenna spacing [m].
    pub min_spacing_m: f64,
    /// Transmit power [W].
    pub tx_power_w: f64,
    /// Noise power [W].
    pub noise_power_w: f64,
    /// Depth of the served region across the waveguide axis [m].
    pub region_depth_m: f64,
    /// Monte Carlo trials per sweep value.
    pub trials: usize,
    /// Master seed, the sole source of randomness.
    pub seed: u64,
    /// Link direction.
    pub direction: Direction,
    /// Protocols to score each trial.
    pub protocols: Vec<Protocol>,
    /// Apply the waveguide loss (true) or zero it (false).
    pub lossy: bool,
    /// Downlink antennas per active segment, `None` fills densely.
    #[serde(default)]
    pub antennas_per_segment: Option<usize>,
    /// Score the conventional single-waveguide baselines too.
    pub include_baselines: bool,
    /// Worker threads, 0 picks the machine default. The results do not
    /// depend on this.
    pub workers: usize,
}

impl ScenarioConfig {
    /// Checks the cross-field constraints a usable configuration must meet.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument(
                "at least one trial is required".to_string(),
            ));
        }
        if self.protocols.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one protocol is required".to_string(),
            ));
        }
        if !(self.region_depth_m.is_finite() && self.region_depth_m > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "region depth must be positive, got {}",
                self.region_depth_m
            )));
        }
        if self.antennas_per_segment == Some(0) {
            return Err(Error::InvalidArgument(
                "antennas per segment must be at least 1".to_string(),
            ));
        }
        Ok(())
    }

    fn base_span_m(&self) -> f64 {
        self.segment_length_m * self.num_segments as f64
    }
}

// ---- service region and user sampling ----

/// Rectangle the users are drawn from.
#[derive(Debug, Clone, Copy)]
pub struct ServiceRegion {
    /// Left edge along the waveguide axis [m].
    pub x_min_m: f64,
    /// Right edge along the waveguide axis [m].
    pub x_max_m: f64,
    /// Half depth across the axis [m], the region spans `[-y, y]`.
    pub y_half_m: f64,
}

impl ServiceRegion {
    /// Region covering the layout span with the given total depth.
    pub fn from_layout(layout: &WaveguideLayout, depth_m: f64) -> ServiceRegion {
        let (x_min_m, x_max_m) = layout.span();
        ServiceRegion {
            x_min_m,
            x_max_m,
            y_half_m: depth_m / 2.0,
        }
    }
}

/// Draws one user position uniformly over the region. The x coordinate is
/// drawn first, then y, so consumers stay reproducible.
pub fn sample_user(region: &ServiceRegion, rng: &mut impl Rng) -> (f64, f64) {
    let gx: f64 = rng.gen();
    let gy: f64 = rng.gen();
    (
        region.x_min_m + (region.x_max_m - region.x_min_m) * gx,
        region.y_half_m * (2.0 * gy - 1.0),
    )
}

// ---- sweep data model ----

/// Quantity varied across a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    /// Total span, segment length held, count re-derived.
    Dx,
    /// Segment count, span held, length re-derived.
    M,
    /// Segment length, span held, count re-derived.
    L,
    /// Downlink antennas per active segment.
    N,
}

impl std::fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweepVariable::Dx => write!(f, "dx"),
            SweepVariable::M => write!(f, "m"),
            SweepVariable::L => write!(f, "l"),
            SweepVariable::N => write!(f, "n"),
        }
    }
}

/// One curve of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CurveTag {
    /// A segmented-waveguide protocol.
    Swan(Protocol),
    /// Conventional single-waveguide uplink, one antenna at the projection.
    Conventional,
    /// Conventional downlink with as many antennas as the selection
    /// protocol achieved, paired per trial.
    Pass1,
    /// Conventional downlink filled densely over the whole span.
    Pass2,
}

impl std::fmt::Display for CurveTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CurveTag::Swan(p) => write!(f, "swan-{p}"),
            CurveTag::Conventional => write!(f, "conventional"),
            CurveTag::Pass1 => write!(f, "pass-1"),
            CurveTag::Pass2 => write!(f, "pass-2"),
        }
    }
}

/// Aggregated outcome of one (sweep value, curve) cell.
#[derive(Debug, Clone)]
pub struct SweepRecord {
    /// The swept value as requested.
    pub sweep_value: f64,
    /// Which curve this row belongs to.
    pub curve: CurveTag,
    /// Trials that contributed.
    pub trials: usize,
    /// Mean linear SNR over the trials.
    pub mean_snr: f64,
    /// Mean achievable rate `log2(1 + snr)` [bit/s/Hz].
    pub mean_rate_bits: f64,
    /// Standard error of the mean rate [bit/s/Hz].
    pub rate_std_error: f64,
    /// Failure that voided this cell, with the means set to NaN.
    pub error: Option<String>,
}

/// All records of a sweep, in value-major then curve order.
#[derive(Debug, Clone)]
pub struct SweepResult {
    /// Quantity that was varied.
    pub variable: SweepVariable,
    /// Master seed the records were produced from.
    pub seed: u64,
    /// One record per (value, curve) pair.
    pub records: Vec<SweepRecord>,
}

// ---- sweep execution ----

fn curve_tags(config: &ScenarioConfig) -> Vec<CurveTag> {
    let mut tags: Vec<CurveTag> = config.protocols.iter().map(|&p| CurveTag::Swan(p)).collect();
    if config.include_baselines {
        match config.direction {
            Direction::Uplink => tags.push(CurveTag::Conventional),
            Direction::Downlink => {
                if config.protocols.contains(&Protocol::Ss) {
                    tags.push(CurveTag::Pass1);
                }
                tags.push(CurveTag::Pass2);
            }
        }
    }
    tags
}

/// Resolves one sweep value into a concrete layout and antenna count.
///
/// Span sweeps hold the configured segment length and re-derive the count;
/// count and length sweeps hold the configured total span. Antenna count
/// sweeps keep the configured geometry and override the per-segment count,
/// which only applies to the downlink.
pub fn sweep_layout(
    config: &ScenarioConfig,
    variable: SweepVariable,
    value: f64,
) -> Result<(WaveguideLayout, Option<usize>)> {
    let make = |m: usize, l: f64| {
        WaveguideLayout::centered(
            m,
            l,
            config.lateral_offset_m,
            config.height_m,
            config.min_spacing_m,
        )
    };
    let span = config.base_span_m();
    match variable {
        SweepVariable::Dx => {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "span must be positive, got {value}"
                )));
            }
            let m = (value / config.segment_length_m).round().max(1.0) as usize;
            Ok((make(m, config.segment_length_m)?, config.antennas_per_segment))
        }
        SweepVariable::M => {
            if !(value.is_finite() && value >= 1.0 && (value - value.round()).abs() < 1e-9) {
                return Err(Error::InvalidArgument(format!(
                    "segment count must be a positive integer, got {value}"
                )));
            }
            let m = value.round() as usize;
            Ok((make(m, span / m as f64)?, config.antennas_per_segment))
        }
        SweepVariable::L => {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "segment length must be positive, got {value}"
                )));
            }
            let m = (span / value).round().max(1.0) as usize;
            Ok((make(m, value)?, config.antennas_per_segment))
        }
        SweepVariable::N => {
            if config.direction != Direction::Downlink {
                return Err(Error::InvalidArgument(
                    "antenna count sweeps only apply to the downlink".to_string(),
                ));
            }
            if !(value.is_finite() && value >= 1.0 && (value - value.round()).abs() < 1e-9) {
                return Err(Error::InvalidArgument(format!(
                    "antenna count must be a positive integer, got {value}"
                )));
            }
            Ok((
                make(config.num_segments, config.segment_length_m)?,
                Some(value.round() as usize),
            ))
        }
    }
}

fn uplink_trial(
    user: &UserLocation,
    layout: &WaveguideLayout,
    radio: &RadioConfig,
    budget: &LinkBudget,
    tags: &[CurveTag],
) -> Result<Vec<f64>> {
    let mut snrs = Vec::with_capacity(tags.len());
    for tag in tags {
        let snr = match tag {
            CurveTag::Swan(Protocol::Ss) => {
                let p = ss_place(user, layout, radio, SsPlacementMode::Exact)?;
                ss_snr(user, &p, layout, radio, budget)?.snr
            }
            CurveTag::Swan(Protocol::Sa) => {
                let p = sa_place(user, layout, radio)?;
                sa_snr(user, &p, layout, radio, budget)?.snr
            }
            CurveTag::Swan(Protocol::Sm) => {
                let p = sm_place(user, layout)?;
                sm_snr(user, &p, layout, radio, budget)?.snr
            }
            CurveTag::Conventional => conventional_uplink_snr(user, layout, radio, budget)?.snr,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "curve {tag} is not an uplink curve"
                )))
            }
        };
        snrs.push(snr);
    }
    Ok(snrs)
}

fn downlink_trial(
    user: &UserLocation,
    layout: &WaveguideLayout,
    radio: &RadioConfig,
    budget: &LinkBudget,
    fixed_n: Option<usize>,
    tags: &[CurveTag],
) -> Result<Vec<f64>> {
    let mut snrs = Vec::with_capacity(tags.len());
    let mut selection_count = None;
    for tag in tags {
        let snr = match tag {
            CurveTag::Swan(p) => {
                let placement = match (p, fixed_n) {
                    (Protocol::Ss, Some(n)) => dl_place(*p, user, layout, radio, &[n])?,
                    (Protocol::Ss, None) => dl_place_dense(*p, user, layout, radio)?,
                    (_, Some(n)) => {
                        dl_place(*p, user, layout, radio, &vec![n; layout.num_segments])?
                    }
                    (_, None) => dl_place_dense(*p, user, layout, radio)?,
                };
                if *p == Protocol::Ss {
                    selection_count = Some(placement.total_antennas());
                }
                dl_snr(user, &placement, layout, radio, budget)?.snr
            }
            CurveTag::Pass1 => {
                let n = selection_count.ok_or_else(|| {
                    Error::InvalidArgument(
                        "the paired baseline needs the selection protocol in the run".to_string(),
                    )
                })?;
                let single = layout.as_single_waveguide();
                let placement = dl_place(Protocol::Ss, user, &single, radio, &[n])?;
                dl_snr(user, &placement, &single, radio, budget)?.snr
            }
            CurveTag::Pass2 => {
                let single = layout.as_single_waveguide();
                let placement = dl_place_dense(Protocol::Ss, user, &single, radio)?;
                dl_snr(user, &placement, &single, radio, budget)?.snr
            }
            CurveTag::Conventional => {
                return Err(Error::InvalidArgument(
                    "the conventional curve is an uplink curve".to_string(),
                ))
            }
        };
        snrs.push(snr);
    }
    Ok(snrs)
}

fn error_records(
    value: f64,
    tags: &[CurveTag],
    trials: usize,
    message: &str,
) -> Vec<SweepRecord> {
    tags.iter()
        .map(|&curve| SweepRecord {
            sweep_value: value,
            curve,
            trials,
            mean_snr: f64::NAN,
            mean_rate_bits: f64::NAN,
            rate_std_error: f64::NAN,
            error: Some(message.to_string()),
        })
        .collect()
}

/// Runs a sweep and aggregates per-curve statistics at every value.
///
/// Trials are paired: at a given value every curve sees the same user
/// draws. A value whose layout or placement is infeasible produces records
/// carrying the error message while the rest of the sweep proceeds. The
/// output is bit-identical for a given seed regardless of `workers`.
pub fn run_sweep(
    config: &ScenarioConfig,
    variable: SweepVariable,
    values: &[f64],
) -> Result<SweepResult> {
    config.validate()?;
    if values.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one sweep value is required".to_string(),
        ));
    }
    let radio_base = make_radio_config(config.carrier_freq_hz, config.n_eff, config.kappa_db_per_m)?;
    let radio = if config.lossy {
        radio_base
    } else {
        radio_base.lossless()
    };
    let budget = LinkBudget::new(config.tx_power_w, config.noise_power_w)?;
    let tags = curve_tags(config);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot build the worker pool: {e}")))?;

    let mut records = Vec::with_capacity(values.len() * tags.len());
    for (value_idx, &value) in values.iter().enumerate() {
        let (layout, fixed_n) = match sweep_layout(config, variable, value) {
            Ok(v) => v,
            Err(e) => {
                records.extend(error_records(value, &tags, config.trials, &e.to_string()));
                continue;
            }
        };

        let outcomes: Vec<Result<Vec<f64>>> = pool.install(|| {
            (0..config.trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
                    rng.set_stream(((value_idx as u64) << 32) | trial as u64);
                    let region = ServiceRegion::from_layout(&layout, config.region_depth_m);
                    let (u_x, u_y) = sample_user(&region, &mut rng);
                    let user = UserLocation::new(u_x, u_y, &layout);
                    match config.direction {
                        Direction::Uplink => uplink_trial(&user, &layout, &radio, &budget, &tags),
                        Direction::Downlink => {
                            downlink_trial(&user, &layout, &radio, &budget, fixed_n, &tags)
                        }
                    }
                })
                .collect()
        });

        // The first failing trial in index order decides the message, so the
        // output does not depend on scheduling.
        if let Some(err) = outcomes.iter().find_map(|r| r.as_ref().err()) {
            records.extend(error_records(value, &tags, config.trials, &err.to_string()));
            continue;
        }
        let snr_rows: Vec<&Vec<f64>> = outcomes.iter().map(|r| r.as_ref().unwrap()).collect();
        for (curve_idx, &curve) in tags.iter().enumerate() {
            let n = snr_rows.len() as f64;
            let mut snr_sum = 0.0;
            let mut rate_sum = 0.0;
            for row in &snr_rows {
                snr_sum += row[curve_idx];
                rate_sum += (1.0 + row[curve_idx]).log2();
            }
            let mean_snr = snr_sum / n;
            let mean_rate = rate_sum / n;
            let mut var = 0.0;
            for row in &snr_rows {
                let d = (1.0 + row[curve_idx]).log2() - mean_rate;
                var += d * d;
            }
            let std_error = if snr_rows.len() > 1 {
                (var / (n - 1.0)).sqrt() / n.sqrt()
            } else {
                0.0
            };
            records.push(SweepRecord {
                sweep_value: value,
                curve,
                trials: snr_rows.len(),
                mean_snr,
                mean_rate_bits: mean_rate,
                rate_std_error: std_error,
                error: None,
            });
        }
    }
    Ok(SweepResult {
        variable,
        seed: config.seed,
        records,
    })
}
