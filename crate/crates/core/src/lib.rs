//! Simulation library for segmented waveguide-enabled pinching-antenna
//! systems.
//!
//! A long dielectric waveguide serving a strip of ground is cut into short
//! segments, each with its own feed, so a radiating antenna never sits far
//! from the feed that drives it. The crate models the resulting channels,
//! places antennas optimally under three activation protocols for both link
//! directions, evaluates closed-form SNR approximations and scaling laws,
//! and ships a deterministic Monte Carlo harness that compares the
//! segmented design against conventional single-waveguide baselines.
//!
//! Modules mirror the pipeline: [`phys`] defines configurations and channel
//! coefficients, [`uplink`] and [`downlink`] place antennas and score them,
//! [`analytics`] holds the closed-form expressions, [`simkit`] runs the
//! reproducible sweeps.

pub mod analytics;
pub mod downlink;
pub mod error;
pub mod phys;
pub mod simkit;
pub mod uplink;

pub use error::{Error, Result};
pub use phys::{
    freespace_coeff, inwaveguide_coeff, make_radio_config, nearest_segment, pa_user_distance,
    LinkBudget, Protocol, RadioConfig, UserLocation, WaveguideLayout, SPEED_OF_LIGHT_M_PER_S,
};
pub use uplink::{
    conventional_uplink_snr, effective_distance, phase_align_shift, phase_spread, sa_place,
    sa_snr, sm_place, sm_snr, ss_place, ss_snr, Placement, PlacementEvent, SnrReport,
    SsPlacementMode,
};
pub use downlink::{
    dl_place, dl_place_dense, dl_snr, mrt_weights, MrtWeights, MultiPlacement, SegmentPlacement,
};
pub use analytics::{
    avg_gain_ss, dl_ss_approx, gain_curve, gain_derivatives, gain_ratio, gain_ratio_limit,
    midpoint_oracle, sa_fixed_dx_stationary_m, sa_gain_asymptotic_slope,
    sa_gain_over_conventional, sa_lemma2_bracket, sa_min_segments, sa_threshold_m,
    sa_uplink_approx, sm_uplink_approx, ApproxParams, GainCurvePoint, MidpointKind,
    SaApproxVariant, SmApproxVariant,
};
pub use simkit::{
    run_sweep, sample_user, sweep_layout, CurveTag, Direction, ScenarioConfig, ServiceRegion,
    SweepRecord, SweepResult, SweepVariable,
};
