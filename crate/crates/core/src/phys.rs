//! Physical constants, radio and waveguide configuration, and the two
//! channel coefficients every protocol composes.
//!
//! The free-space coefficient between an antenna at `x` on the waveguide and
//! a user at `(u_x, u_y)` on the ground is
//!
//! ```text
//! h_o = sqrt(eta) * exp(-j * k0 * r) / r,    r = sqrt((u_x - x)^2 + c_y)
//! ```
//!
//! where `eta = c^2 / (16 pi^2 f_c^2)` and `c_y` folds the fixed lateral and
//! vertical offsets into one squared distance. The in-waveguide coefficient
//! from a segment feed to an antenna `dist` meters down the segment is
//!
//! ```text
//! h_i = 10^(-kappa * dist / 20) * exp(-j * 2 pi * dist / lambda_g)
//! ```
//!
//! with `lambda_g = lambda / n_eff` the guided wavelength. Both coefficients
//! are deterministic functions of geometry, so every higher-level quantity in
//! this crate is reproducible from the configuration structs defined here.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// ---- constants ----

/// Speed of light in vacuum [m/s].
pub const SPEED_OF_LIGHT_M_PER_S: f64 = 299_792_458.0;

// ---- protocol tags ----

/// Activation protocol for the segmented waveguide array.
///
/// `Ss` activates the segment nearest the user, `Sa` combines all segments
/// into one coherent beam, `Sm` gives each segment its own RF chain and
/// combines ratios at the processor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    /// Segment selection, one active segment.
    Ss,
    /// Segment aggregation, all segments feed one coherent sum.
    Sa,
    /// Segment multiplexing, per-segment chains with ratio combining.
    Sm,
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Protocol::Ss => write!(f, "ss"),
            Protocol::Sa => write!(f, "sa"),
            Protocol::Sm => write!(f, "sm"),
        }
    }
}

// ---- radio configuration ----

/// Carrier-derived constants used by every channel expression.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadioConfig {
    /// Carrier frequency [Hz].
    pub carrier_freq_hz: f64,
    /// Effective refractive index of the dielectric waveguide, at least 1.
    pub n_eff: f64,
    /// In-waveguide propagation loss [dB/m].
    pub kappa_db_per_m: f64,
    /// Free-space wavelength `c / f_c` [m].
    pub wavelength_m: f64,
    /// Guided wavelength `lambda / n_eff` [m].
    pub guided_wavelength_m: f64,
    /// Free-space wavenumber `2 pi / lambda` [rad/m].
    pub wavenumber_rad_per_m: f64,
    /// Free-space path gain constant `c^2 / (16 pi^2 f_c^2)` [m^2].
    pub eta_m2: f64,
    /// Amplitude attenuation rate `kappa * ln(10) / 20` [1/m].
    pub alpha_per_m: f64,
}

/// Builds a [`RadioConfig`] from the three primary inputs, deriving the
/// wavelengths, wavenumber, path gain constant, and attenuation rate.
///
/// Errors with [`Error::InvalidArgument`] when the carrier frequency is not
/// positive, the refractive index is below 1, or the loss rate is negative.
pub fn make_radio_config(
    carrier_freq_hz: f64,
    n_eff: f64,
    kappa_db_per_m: f64,
) -> Result<RadioConfig> {
    if !(carrier_freq_hz.is_finite() && carrier_freq_hz > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "carrier frequency must be positive, got {carrier_freq_hz}"
        )));
    }
    if !(n_eff.is_finite() && n_eff >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "effective refractive index must be at least 1, got {n_eff}"
        )));
    }
    if !(kappa_db_per_m.is_finite() && kappa_db_per_m >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "waveguide loss must be non-negative, got {kappa_db_per_m} dB/m"
        )));
    }
    let wavelength_m = SPEED_OF_LIGHT_M_PER_S / carrier_freq_hz;
    let eta_m2 = SPEED_OF_LIGHT_M_PER_S * SPEED_OF_LIGHT_M_PER_S
        / (16.0 * std::f64::consts::PI * std::f64::consts::PI * carrier_freq_hz * carrier_freq_hz);
    Ok(RadioConfig {
        carrier_freq_hz,
        n_eff,
        kappa_db_per_m,
        wavelength_m,
        guided_wavelength_m: wavelength_m / n_eff,
        wavenumber_rad_per_m: 2.0 * std::f64::consts::PI / wavelength_m,
        eta_m2,
        alpha_per_m: kappa_db_per_m * std::f64::consts::LN_10 / 20.0,
    })
}

impl RadioConfig {
    /// Copy of this configuration with the waveguide loss removed. Placement
    /// and phase constants are unchanged, only the attenuation goes to zero.
    pub fn lossless(&self) -> RadioConfig {
        RadioConfig {
            kappa_db_per_m: 0.0,
            alpha_per_m: 0.0,
            ..self.clone()
        }
    }
}

// ---- waveguide layout ----

/// Geometry of the segmented waveguide along the x axis.
///
/// The array consists of `num_segments` segments of equal length laid end to
/// end, so the served span is exactly `segment_length_m * num_segments`.
/// Segment `m` (1-based) covers `[feed_x(m), feed_x(m) + L]` with its feed at
/// the left end.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaveguideLayout {
    /// Number of segments `M`, at least 1.
    pub num_segments: usize,
    /// Length of each segment `L` [m].
    pub segment_length_m: f64,
    /// Total span `D_x = L * M` [m].
    pub side_length_m: f64,
    /// Feed position of the first segment [m].
    pub first_feed_x_m: f64,
    /// Lateral offset of the waveguide from the x axis [m].
    pub lateral_offset_m: f64,
    /// Height of the waveguide above the user plane [m].
    pub height_m: f64,
    /// Minimum spacing between antennas on one waveguide [m].
    pub min_spacing_m: f64,
}

impl WaveguideLayout {
    /// Builds a layout with an explicit first feed position.
    ///
    /// Errors with [`Error::InvalidArgument`] when the segment count is zero
    /// or a length, height, or spacing is not positive and finite.
    pub fn new(
        num_segments: usize,
        segment_length_m: f64,
        first_feed_x_m: f64,
        lateral_offset_m: f64,
        height_m: f64,
        min_spacing_m: f64,
    ) -> Result<WaveguideLayout> {
        if num_segments == 0 {
            return Err(Error::InvalidArgument(
                "segment count must be at least 1".to_string(),
            ));
        }
        if !(segment_length_m.is_finite() && segment_length_m > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "segment length must be positive, got {segment_length_m}"
            )));
        }
        if !first_feed_x_m.is_finite() || !lateral_offset_m.is_finite() {
            return Err(Error::InvalidArgument(
                "feed and lateral offsets must be finite".to_string(),
            ));
        }
        if !(height_m.is_finite() && height_m > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "waveguide height must be positive, got {height_m}"
            )));
        }
        if !(min_spacing_m.is_finite() && min_spacing_m > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "antenna spacing must be positive, got {min_spacing_m}"
            )));
        }
        Ok(WaveguideLayout {
            num_segments,
            segment_length_m,
            side_length_m: segment_length_m * num_segments as f64,
            first_feed_x_m,
            lateral_offset_m,
            height_m,
            min_spacing_m,
        })
    }

    /// Builds a layout centered on the origin, so the first feed sits at
    /// `-L * M / 2`. This is the geometry used throughout the evaluation
    /// harness.
    pub fn centered(
        num_segments: usize,
        segment_length_m: f64,
        lateral_offset_m: f64,
        height_m: f64,
        min_spacing_m: f64,
    ) -> Result<WaveguideLayout> {
        let half_span = segment_length_m * num_segments as f64 / 2.0;
        WaveguideLayout::new(
            num_segments,
            segment_length_m,
            -half_span,
            lateral_offset_m,
            height_m,
            min_spacing_m,
        )
    }

    /// Feed position of segment `m` (1-based) [m].
    pub fn feed_x(&self, segment: usize) -> f64 {
        debug_assert!(segment >= 1 && segment <= self.num_segments);
        self.first_feed_x_m + (segment as f64 - 1.0) * self.segment_length_m
    }

    /// Left boundary of segment `m` (1-based), identical to its feed [m].
    pub fn segment_start(&self, segment: usize) -> f64 {
        self.feed_x(segment)
    }

    /// Right boundary of segment `m` (1-based) [m].
    pub fn segment_end(&self, segment: usize) -> f64 {
        self.first_feed_x_m + segment as f64 * self.segment_length_m
    }

    /// Served interval `[x_min, x_max]` along the x axis [m].
    pub fn span(&self) -> (f64, f64) {
        (
            self.first_feed_x_m,
            self.first_feed_x_m + self.side_length_m,
        )
    }

    /// Conventional single-waveguide version of this layout: one segment
    /// spanning the same interval with its feed at the left end. Used by the
    /// baseline systems in the evaluation harness.
    pub fn as_single_waveguide(&self) -> WaveguideLayout {
        WaveguideLayout {
            num_segments: 1,
            segment_length_m: self.side_length_m,
            side_length_m: self.side_length_m,
            first_feed_x_m: self.first_feed_x_m,
            lateral_offset_m: self.lateral_offset_m,
            height_m: self.height_m,
            min_spacing_m: self.min_spacing_m,
        }
    }
}

// ---- user location ----

/// A user position on the ground plane, with the squared cross-axis distance
/// to the waveguide cached.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct UserLocation {
    /// User x coordinate [m].
    pub u_x_m: f64,
    /// User y coordinate [m].
    pub u_y_m: f64,
    /// Squared cross-axis distance `(u_y - psi_w)^2 + d^2` [m^2].
    pub c_y_m2: f64,
}

impl UserLocation {
    /// Locates a user relative to a layout, caching `c_y`.
    pub fn new(u_x_m: f64, u_y_m: f64, layout: &WaveguideLayout) -> UserLocation {
        let dy = u_y_m - layout.lateral_offset_m;
        UserLocation {
            u_x_m,
            u_y_m,
            c_y_m2: dy * dy + layout.height_m * layout.height_m,
        }
    }
}

/// Straight-line distance from an antenna at `pa_x` on the waveguide to the
/// user [m].
pub fn pa_user_distance(user: &UserLocation, pa_x_m: f64) -> f64 {
    let dx = user.u_x_m - pa_x_m;
    (dx * dx + user.c_y_m2).sqrt()
}

// ---- link budget ----

/// Transmit power and noise power shared by all SNR expressions.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LinkBudget {
    /// Transmit power `P` [W].
    pub tx_power_w: f64,
    /// Noise power `sigma^2` per receive chain [W].
    pub noise_power_w: f64,
}

impl LinkBudget {
    /// Validated constructor, both powers must be positive and finite.
    pub fn new(tx_power_w: f64, noise_power_w: f64) -> Result<LinkBudget> {
        if !(tx_power_w.is_finite() && tx_power_w > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "transmit power must be positive, got {tx_power_w}"
            )));
        }
        if !(noise_power_w.is_finite() && noise_power_w > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "noise power must be positive, got {noise_power_w}"
            )));
        }
        Ok(LinkBudget {
            tx_power_w,
            noise_power_w,
        })
    }

    /// Transmit power over noise power, the SNR before any channel gain.
    pub fn power_ratio(&self) -> f64 {
        self.tx_power_w / self.noise_power_w
    }
}

// ---- channel coefficients ----

/// Free-space channel coefficient from an antenna at `pa_x` to the user.
///
/// Magnitude is `sqrt(eta) / r` and phase is `-k0 * r` with `r` the
/// antenna-user distance, so `|h_o|^2 * r^2 = eta` exactly.
pub fn freespace_coeff(user: &UserLocation, pa_x_m: f64, radio: &RadioConfig) -> Complex64 {
    let r = pa_user_distance(user, pa_x_m);
    let amplitude = radio.eta_m2.sqrt() / r;
    let phase = -radio.wavenumber_rad_per_m * r;
    Complex64::from_polar(amplitude, phase)
}

/// In-waveguide channel coefficient from the segment feed to an antenna
/// `|pa_x - feed_x|` meters along the segment.
///
/// Magnitude is `10^(-kappa dist / 20)` and phase is `-2 pi dist / lambda_g`,
/// so the power loss is `10^(-kappa dist / 10)`.
pub fn inwaveguide_coeff(pa_x_m: f64, feed_x_m: f64, radio: &RadioConfig) -> Complex64 {
    let dist = (pa_x_m - feed_x_m).abs();
    let amplitude = 10f64.powf(-radio.kappa_db_per_m * dist / 20.0);
    let phase = -2.0 * std::f64::consts::PI * dist / radio.guided_wavelength_m;
    Complex64::from_polar(amplitude, phase)
}

// ---- segment lookup ----

/// Index (1-based) of the segment whose span contains the user's x
/// coordinate. Boundary points between two segments belong to the left one,
/// and the left edge of the first segment maps to segment 1.
///
/// Errors with [`Error::OutOfRange`] when `u_x` falls outside the served
/// span.
pub fn nearest_segment(u_x_m: f64, layout: &WaveguideLayout) -> Result<usize> {
    let offset = u_x_m - layout.first_feed_x_m;
    if !offset.is_finite() || offset < 0.0 || offset > layout.side_length_m {
        return Err(Error::OutOfRange(format!(
            "user x = {u_x_m} m is outside the served span [{}, {}] m",
            layout.first_feed_x_m,
            layout.first_feed_x_m + layout.side_length_m
        )));
    }
    if offset == 0.0 {
        return Ok(1);
    }
    let index = (offset / layout.segment_length_m).ceil() as usize;
    Ok(index.clamp(1, layout.num_segments))
}
