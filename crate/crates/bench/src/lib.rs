//! Shared fixtures for the benchmark suite.
//!
//! The reference geometry mirrors the simulation defaults: 28 GHz carrier,
//! refractive index 1.4, loss 0.08 dB/m, 1 m segments centered on the
//! origin, waveguide 3 m above the user plane, half-wavelength spacing.

use swan_core::{make_radio_config, LinkBudget, RadioConfig, UserLocation, WaveguideLayout};

/// Reference radio model.
pub fn radio() -> RadioConfig {
    make_radio_config(28.0e9, 1.4, 0.08).unwrap()
}

/// Reference link budget: 10 dBm transmit power, -90 dBm noise.
pub fn budget() -> LinkBudget {
    LinkBudget::new(0.01, 1e-12).unwrap()
}

/// Centered layout with `num_segments` segments of 1 m.
pub fn layout(num_segments: usize) -> WaveguideLayout {
    let radio = radio();
    WaveguideLayout::centered(num_segments, 1.0, 0.0, 3.0, radio.wavelength_m / 2.0).unwrap()
}

/// A user off center and off axis, so nothing degenerates.
pub fn user(layout: &WaveguideLayout) -> UserLocation {
    let (lo, hi) = layout.span();
    UserLocation::new(lo + 0.37 * (hi - lo), 1.25, layout)
}
