//! Closed-form selection gain versus segment count.
//!
//! Emits `gain_curve.csv` with one row per segment count: the average
//! in-waveguide gain of the segmented array, the single-waveguide gain over
//! the same span, and their ratio.

use std::time::Instant;

use swan_core::{avg_gain_ss, gain_ratio, make_radio_config};

use crate::error::{CliError, CliResult};
use crate::output::{float_cell, int_cell, prepare_dir, write_manifest, CsvFile};
use crate::sweep::parse_values;
use crate::GainCurveArgs;

pub fn run(args: &GainCurveArgs, started: Instant) -> CliResult<()> {
    let values = parse_values(&args.m_values)?;
    let counts: Vec<usize> = values
        .iter()
        .map(|&v| {
            if v >= 1.0 && (v - v.round()).abs() < 1e-9 {
                Ok(v.round() as usize)
            } else {
                Err(CliError::Usage(format!(
                    "segment counts must be positive integers, got {v}"
                )))
            }
        })
        .collect::<CliResult<_>>()?;
    let radio = make_radio_config(28.0e9, 1.4, args.kappa)
        .map_err(|err| CliError::Config(err.to_string()))?;
    if !(args.dx.is_finite() && args.dx > 0.0) {
        return Err(CliError::Config(format!(
            "span must be positive, got {}",
            args.dx
        )));
    }

    prepare_dir(&args.out)?;
    let mut csv = CsvFile::new(&args.out, "gain_curve.csv", &["M", "A_ss", "A_conv", "ratio"]);
    let a_conv = avg_gain_ss(1.0, args.dx, radio.alpha_per_m)
        .map_err(|err| CliError::Runtime(err.to_string()))?;
    for &m in &counts {
        let a_ss = avg_gain_ss(m as f64, args.dx, radio.alpha_per_m)
            .map_err(|err| CliError::Runtime(err.to_string()))?;
        let ratio = gain_ratio(m as f64, args.dx, radio.alpha_per_m)
            .map_err(|err| CliError::Runtime(err.to_string()))?;
        csv.push_row(&[
            int_cell(m),
            float_cell(a_ss),
            float_cell(a_conv),
            float_cell(ratio),
        ]);
    }
    let outputs = vec![csv.finish()?];
    let resolved = serde_json::json!({
        "dx_m": args.dx,
        "kappa_db_per_m": args.kappa,
        "segment_counts": counts,
    });
    write_manifest(&args.out, "gain_curve", resolved, None, &outputs, started)
}
