//! Subcommand implementations.

pub mod figures;
pub mod gain_curve;
pub mod link_snr;
pub mod rate_sweep;
pub mod validate_approx;
