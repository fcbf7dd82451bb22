//! Closed-form approximations against brute-force references.
//!
//! Each mode emits `validate_approx.csv` with rows (count, exact, approx,
//! rel_err):
//!
//! - `--lemma 1`: average selection gain against a midpoint quadrature of
//!   the in-waveguide channel magnitude over user positions.
//! - `--lemma 2`: aggregation SNR approximation against the exactly placed
//!   and coherently summed array at zero loss. Odd segment counts are the
//!   approximation's domain; even values in the range are skipped.
//! - `--target sm`: multiplexing SNR approximation against the exact
//!   placement, same domain rules as lemma 2.
//! - `--target dl-ss`: downlink selection SNR approximation against the
//!   exact coherent sum over the half-wavelength antenna grid.

use std::time::Instant;

use swan_core::{
    avg_gain_ss, dl_ss_approx, inwaveguide_coeff, make_radio_config, sa_place, sa_snr, sm_place,
    sm_snr, sa_uplink_approx, sm_uplink_approx, ApproxParams, LinkBudget, SaApproxVariant,
    SmApproxVariant, UserLocation, WaveguideLayout,
};

use crate::error::{CliError, CliResult};
use crate::output::{float_cell, int_cell, prepare_dir, write_manifest, CsvFile};
use crate::sweep::parse_values;
use crate::ValidateApproxArgs;

/// Reference transmit and noise power [W].
const TX_POWER_W: f64 = 0.01;
const NOISE_POWER_W: f64 = 1e-12;

pub fn run(args: &ValidateApproxArgs, started: Instant) -> CliResult<()> {
    let mode = match (args.lemma, args.target.as_deref()) {
        (Some(1), None) => Mode::Lemma1,
        (Some(2), None) => Mode::Lemma2,
        (None, Some("sm")) => Mode::Sm,
        (None, Some("dl-ss")) => Mode::DlSs,
        (Some(other), None) => {
            return Err(CliError::Usage(format!(
                "unknown lemma {other}, expected 1 or 2"
            )))
        }
        (None, Some(other)) => {
            return Err(CliError::Usage(format!(
                "unknown target '{other}', expected sm or dl-ss"
            )))
        }
        _ => {
            return Err(CliError::Usage(
                "pass exactly one of --lemma or --target".to_string(),
            ))
        }
    };

    if !(args.cy.is_finite() && args.cy > 0.0) {
        return Err(CliError::Config(format!(
            "cy must be positive, got {}",
            args.cy
        )));
    }
    if !(args.length.is_finite() && args.length > 0.0) {
        return Err(CliError::Config(format!(
            "segment length must be positive, got {}",
            args.length
        )));
    }

    prepare_dir(&args.out)?;
    let (first_column, rows) = match mode {
        Mode::Lemma1 => ("M", lemma1_rows(args)?),
        Mode::Lemma2 => ("M", uplink_rows(args, UplinkKind::Aggregation)?),
        Mode::Sm => ("M", uplink_rows(args, UplinkKind::Multiplexing)?),
        Mode::DlSs => ("N", dl_ss_rows(args)?),
    };

    let mut csv = CsvFile::new(
        &args.out,
        "validate_approx.csv",
        &[first_column, "exact", "approx", "rel_err"],
    );
    for (count, exact, approx) in &rows {
        let rel_err = (exact - approx).abs() / exact;
        csv.push_row(&[
            int_cell(*count),
            float_cell(*exact),
            float_cell(*approx),
            float_cell(rel_err),
        ]);
    }
    let outputs = vec![csv.finish()?];
    let resolved = serde_json::json!({
        "lemma": args.lemma,
        "target": args.target,
        "cy_m2": args.cy,
        "segment_length_m": args.length,
        "dx_m": args.dx,
        "kappa_db_per_m": args.kappa,
    });
    write_manifest(&args.out, "validate_approx", resolved, None, &outputs, started)
}

enum Mode {
    Lemma1,
    Lemma2,
    Sm,
    DlSs,
}

enum UplinkKind {
    Aggregation,
    Multiplexing,
}

fn core_err(err: swan_core::Error) -> CliError {
    CliError::Runtime(err.to_string())
}

fn integer_counts(text: &str) -> CliResult<Vec<usize>> {
    parse_values(text)?
        .into_iter()
        .map(|v| {
            if v >= 1.0 && (v - v.round()).abs() < 1e-9 {
                Ok(v.round() as usize)
            } else {
                Err(CliError::Usage(format!(
                    "counts must be positive integers, got {v}"
                )))
            }
        })
        .collect()
}

// ---- lemma 1: average selection gain ----

fn lemma1_rows(args: &ValidateApproxArgs) -> CliResult<Vec<(usize, f64, f64)>> {
    let radio = make_radio_config(28.0e9, 1.4, args.kappa)
        .map_err(|err| CliError::Config(err.to_string()))?;
    if !(args.dx.is_finite() && args.dx > 0.0) {
        return Err(CliError::Config(format!(
            "span must be positive, got {}",
            args.dx
        )));
    }
    let panels = 2001usize;
    let mut rows = Vec::new();
    for m in integer_counts(&args.m_values)? {
        let length = args.dx / m as f64;
        let layout = WaveguideLayout::centered(m, length, 0.0, 3.0, radio.wavelength_m / 2.0)
            .map_err(core_err)?;
        let feed = layout.feed_x(1);
        let start = layout.segment_start(1);
        // Midpoint average of the squared in-waveguide magnitude over user
        // positions in one segment; the segments are congruent so this is
        // the span-wide average.
        let mut sum = 0.0;
        for j in 0..panels {
            let position = start + length * (j as f64 + 0.5) / panels as f64;
            sum += inwaveguide_coeff(position, feed, &radio).norm_sqr();
        }
        let exact = sum / panels as f64;
        let approx = avg_gain_ss(m as f64, args.dx, radio.alpha_per_m).map_err(core_err)?;
        rows.push((m, exact, approx));
    }
    Ok(rows)
}

// ---- lemma 2 and sm: uplink SNR approximations ----

fn uplink_rows(
    args: &ValidateApproxArgs,
    kind: UplinkKind,
) -> CliResult<Vec<(usize, f64, f64)>> {
    let radio = make_radio_config(28.0e9, 1.4, 0.0)
        .map_err(|err| CliError::Config(err.to_string()))?;
    let budget =
        LinkBudget::new(TX_POWER_W, NOISE_POWER_W).map_err(|err| CliError::Config(err.to_string()))?;
    let delta = radio.wavelength_m / 2.0;
    let height = args.cy.sqrt();
    let mut rows = Vec::new();
    for m in integer_counts(&args.m_values)? {
        if m % 2 == 0 {
            continue;
        }
        let layout = WaveguideLayout::centered(m, args.length, 0.0, height, delta)
            .map_err(core_err)?;
        let user = UserLocation::new(0.0, 0.0, &layout);
        let params =
            ApproxParams::new(m, args.length, args.cy, delta).map_err(core_err)?;
        let (exact, approx) = match kind {
            UplinkKind::Aggregation => {
                let placement = sa_place(&user, &layout, &radio).map_err(core_err)?;
                let exact = sa_snr(&user, &placement, &layout, &radio, &budget)
                    .map_err(core_err)?
                    .snr;
                let approx =
                    sa_uplink_approx(SaApproxVariant::Lemma2, &params, &budget, radio.eta_m2)
                        .map_err(core_err)?;
                (exact, approx)
            }
            UplinkKind::Multiplexing => {
                let placement = sm_place(&user, &layout).map_err(core_err)?;
                let exact = sm_snr(&user, &placement, &layout, &radio, &budget)
                    .map_err(core_err)?
                    .snr;
                let approx =
                    sm_uplink_approx(SmApproxVariant::Full, &params, &budget, radio.eta_m2)
                        .map_err(core_err)?;
                (exact, approx)
            }
        };
        rows.push((m, exact, approx));
    }
    Ok(rows)
}

// ---- dl-ss: downlink selection SNR approximation ----

fn dl_ss_rows(args: &ValidateApproxArgs) -> CliResult<Vec<(usize, f64, f64)>> {
    let radio = make_radio_config(28.0e9, 1.4, 0.0)
        .map_err(|err| CliError::Config(err.to_string()))?;
    let budget =
        LinkBudget::new(TX_POWER_W, NOISE_POWER_W).map_err(|err| CliError::Config(err.to_string()))?;
    let delta = radio.wavelength_m / 2.0;
    let counts = integer_counts(&args.n_values)?;
    let max_count = *counts.iter().max().unwrap();
    if max_count > 10_000_000 {
        return Err(CliError::Config(format!(
            "antenna count {max_count} is too large to tabulate"
        )));
    }

    // Exact coherent sums over the alternating half-wavelength grid: one
    // antenna at the projection, then pairs at +-k spacing outward, with
    // compensated summation. brackets[n] holds the field sum for n antennas.
    let mut brackets = vec![0.0f64; max_count + 1];
    let mut sum = 1.0 / args.cy.sqrt();
    let mut compensation = 0.0f64;
    brackets[1] = sum;
    for (n, bracket) in brackets.iter_mut().enumerate().skip(2) {
        let k = (n / 2) as f64;
        let term = 1.0 / (args.cy + (k * delta) * (k * delta)).sqrt();
        let y = term - compensation;
        let t = sum + y;
        compensation = (t - sum) - y;
        sum = t;
        *bracket = sum;
    }

    let span = (max_count as f64) * delta;
    let params = ApproxParams::new(1, span, args.cy, delta).map_err(core_err)?;
    let ratio = budget.power_ratio() * radio.eta_m2;
    let mut rows = Vec::new();
    for n in counts {
        let exact = ratio * brackets[n] * brackets[n] / n as f64;
        let approx = dl_ss_approx(n, &params, &budget, radio.eta_m2).map_err(core_err)?;
        rows.push((n, exact, approx));
    }
    Ok(rows)
}
