//! Monte Carlo mean rate and SNR over random user positions.
//!
//! Runs the deterministic sweep harness and writes one CSV per curve
//! (protocols first, then baselines), named `rate_sweep_<curve>.csv`.
//! Per-value failures become error rows inside the affected curve files and
//! the command still exits 0.

use std::path::Path;
use std::time::Instant;

use swan_core::{run_sweep, CurveTag, Direction, SweepRecord, SweepResult, SweepVariable};

use crate::error::{CliError, CliResult};
use crate::output::{float_cell, int_cell, prepare_dir, text_cell, write_manifest, CsvFile};
use crate::scenario;
use crate::sweep::{parse_values, parse_variable};
use crate::RateSweepArgs;

pub fn run(args: &RateSweepArgs, started: Instant) -> CliResult<()> {
    let mut file = scenario::load(args.scenario.as_deref())?;
    file.apply_overrides(&args.set)?;
    let workers = scenario::workers_from_env()?;
    let config = file.resolve(workers)?;
    let variable = parse_variable(&args.sweep)?;
    if variable == SweepVariable::N && config.direction != Direction::Downlink {
        return Err(CliError::Config(
            "antenna count sweeps only apply to the downlink".to_string(),
        ));
    }
    let values = parse_values(&args.values)?;

    let result = run_sweep(&config, variable, &values)
        .map_err(|err| CliError::Config(err.to_string()))?;

    prepare_dir(&args.out)?;
    let outputs = write_curve_files(&result, variable, &args.out, "rate_sweep")?;

    let resolved = serde_json::json!({
        "config": config,
        "sweep": variable.to_string(),
        "values": values,
    });
    write_manifest(
        &args.out,
        "rate_sweep",
        resolved,
        Some(result.seed),
        &outputs,
        started,
    )
}

/// Writes one CSV per curve, named `<prefix>_<curve>.csv`, and returns the
/// file names. Curves keep their first-appearance order, which follows the
/// configured protocol order and then the baselines.
pub fn write_curve_files(
    result: &SweepResult,
    variable: SweepVariable,
    dir: &Path,
    prefix: &str,
) -> CliResult<Vec<String>> {
    let mut curves: Vec<CurveTag> = Vec::new();
    for record in &result.records {
        if !curves.contains(&record.curve) {
            curves.push(record.curve);
        }
    }
    let header = [
        variable.to_string(),
        "trials".to_string(),
        "mean_snr".to_string(),
        "mean_rate_bits".to_string(),
        "rate_std_error".to_string(),
        "error".to_string(),
    ];
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut outputs = Vec::new();
    for curve in curves {
        let name = format!("{prefix}_{curve}.csv");
        let mut csv = CsvFile::new(dir, &name, &header_refs);
        for record in result.records.iter().filter(|r| r.curve == curve) {
            csv.push_row(&row_cells(record));
        }
        outputs.push(csv.finish()?);
    }
    Ok(outputs)
}

fn row_cells(record: &SweepRecord) -> Vec<String> {
    vec![
        float_cell(record.sweep_value),
        int_cell(record.trials),
        float_cell(record.mean_snr),
        float_cell(record.mean_rate_bits),
        float_cell(record.rate_std_error),
        match &record.error {
            Some(message) => text_cell(message),
            None => String::new(),
        },
    ]
}
