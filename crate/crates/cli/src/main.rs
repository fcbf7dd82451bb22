//! Command-line front end for the SWAN simulation library.
//!
//! Subcommands compute closed-form gain curves, exact per-protocol SNR
//! sweeps, Monte Carlo rate sweeps, approximation validations, and
//! regenerate the published result sets by tag. Outputs are CSV files plus
//! a JSON run manifest per command.
//!
//! Exit codes: 0 success (including sweeps with per-row error records),
//! 2 usage error, 3 configuration error, 4 runtime error.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

mod commands;
mod error;
mod output;
mod scenario;
mod sweep;

use error::CliResult;

#[derive(Parser)]
#[command(
    name = "swan",
    version,
    about = "Segmented-waveguide antenna system simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form selection gain versus segment count.
    GainCurve(GainCurveArgs),
    /// Exact per-protocol uplink SNR for one user across a sweep.
    UplinkSnr(LinkSnrArgs),
    /// Exact per-protocol downlink SNR for one user across a sweep.
    DownlinkSnr(LinkSnrArgs),
    /// Monte Carlo mean rate and SNR over random user positions.
    RateSweep(RateSweepArgs),
    /// Closed-form approximations against brute-force references.
    ValidateApprox(ValidateApproxArgs),
    /// Regenerate a published result set by figure tag.
    ReproduceFigure(ReproduceFigureArgs),
}

#[derive(Args)]
pub struct GainCurveArgs {
    /// Total span covered by the segments [m].
    #[arg(long = "Dx", default_value_t = 100.0)]
    pub dx: f64,
    /// In-waveguide attenuation [dB/m].
    #[arg(long, default_value_t = 0.08)]
    pub kappa: f64,
    /// Segment counts, e.g. "1..64" or "1,2,4,8".
    #[arg(long = "M", default_value = "1..64")]
    pub m_values: String,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct LinkSnrArgs {
    /// Scenario file; built-in defaults when absent.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Scenario overrides as section.key=value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Sweep variable: dx, m, l (downlink also n).
    #[arg(long)]
    pub sweep: String,
    /// Sweep values, e.g. "10..500:10".
    #[arg(long)]
    pub values: String,
    /// User x coordinate [m].
    #[arg(long, default_value_t = 0.0)]
    pub ux: f64,
    /// User y coordinate [m].
    #[arg(long, default_value_t = 0.0)]
    pub uy: f64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct RateSweepArgs {
    /// Scenario file; built-in defaults when absent.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Scenario overrides as section.key=value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Sweep variable: dx, m, l (downlink also n).
    #[arg(long)]
    pub sweep: String,
    /// Sweep values, e.g. "20..200:20".
    #[arg(long)]
    pub values: String,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct ValidateApproxArgs {
    /// Closed-form lemma to validate: 1 (selection gain) or 2 (aggregation SNR).
    #[arg(long)]
    pub lemma: Option<u8>,
    /// Named target: sm (multiplexing SNR) or dl-ss (downlink selection SNR).
    #[arg(long)]
    pub target: Option<String>,
    /// Squared user-to-waveguide distance in the vertical plane [m^2].
    #[arg(long, default_value_t = 9.0)]
    pub cy: f64,
    /// Segment length [m].
    #[arg(long = "L", default_value_t = 1.0)]
    pub length: f64,
    /// Total span for lemma 1 [m].
    #[arg(long = "Dx", default_value_t = 100.0)]
    pub dx: f64,
    /// In-waveguide attenuation for lemma 1 [dB/m].
    #[arg(long, default_value_t = 0.08)]
    pub kappa: f64,
    /// Segment counts for lemma and sm validations.
    #[arg(long = "M", default_value = "11..201")]
    pub m_values: String,
    /// Antenna counts for the dl-ss validation.
    #[arg(long = "N", default_value = "1..4200:20")]
    pub n_values: String,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct ReproduceFigureArgs {
    /// Figure tag: fig5a, fig5b, fig6a, fig6b, fig7, fig8, fig9, fig10, fig11.
    #[arg(long)]
    pub tag: String,
    /// Scenario file; built-in defaults when absent.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Scenario overrides as section.key=value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

fn run(command: Command, started: Instant) -> CliResult<()> {
    match command {
        Command::GainCurve(args) => commands::gain_curve::run(&args, started),
        Command::UplinkSnr(args) => {
            commands::link_snr::run(swan_core::Direction::Uplink, &args, started)
        }
        Command::DownlinkSnr(args) => {
            commands::link_snr::run(swan_core::Direction::Downlink, &args, started)
        }
        Command::RateSweep(args) => commands::rate_sweep::run(&args, started),
        Command::ValidateApprox(args) => commands::validate_approx::run(&args, started),
        Command::ReproduceFigure(args) => commands::figures::run(&args, started),
    }
}

fn main() {
    let started = Instant::now();
    let cli = Cli::parse();
    if let Err(err) = run(cli.command, started) {
        let record = serde_json::json!({
            "error": { "kind": err.kind(), "message": err.message() }
        });
        eprintln!("{record}");
        std::process::exit(err.exit_code());
    }
}
