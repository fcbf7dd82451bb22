//! Exact per-protocol SNR for one user across a sweep.
//!
//! Evaluates the placement machinery at a fixed user location for each
//! sweep value and emits one CSV row per value: the SNR under each
//! configured protocol plus the single-waveguide baselines. Failures at
//! individual sweep values become per-row error records; the command still
//! exits 0.

use std::time::Instant;

use swan_core::{
    conventional_uplink_snr, dl_place, dl_place_dense, dl_snr, make_radio_config, sa_place,
    sa_snr, sm_place, sm_snr, ss_place, ss_snr, sweep_layout, Direction, LinkBudget, Protocol,
    RadioConfig, ScenarioConfig, SsPlacementMode, SweepVariable, UserLocation,
};

use crate::error::{CliError, CliResult};
use crate::output::{float_cell, prepare_dir, text_cell, write_manifest, CsvFile};
use crate::sweep::{parse_values, parse_variable};
use crate::{scenario, LinkSnrArgs};

pub fn run(direction: Direction, args: &LinkSnrArgs, started: Instant) -> CliResult<()> {
    let mut file = scenario::load(args.scenario.as_deref())?;
    file.apply_overrides(&args.set)?;
    file.run.direction = direction;
    let config = file.resolve(0)?;
    let variable = parse_variable(&args.sweep)?;
    if variable == SweepVariable::N && direction != Direction::Downlink {
        return Err(CliError::Config(
            "antenna count sweeps only apply to the downlink".to_string(),
        ));
    }
    let values = parse_values(&args.values)?;

    let mut radio = make_radio_config(config.carrier_freq_hz, config.n_eff, config.kappa_db_per_m)
        .map_err(|err| CliError::Config(err.to_string()))?;
    if !config.lossy {
        radio = radio.lossless();
    }
    let budget = LinkBudget::new(config.tx_power_w, config.noise_power_w)
        .map_err(|err| CliError::Config(err.to_string()))?;

    // ---- column layout ----

    let with_pass1 = config.include_baselines && config.protocols.contains(&Protocol::Ss);
    let mut header = vec![variable.to_string()];
    for protocol in &config.protocols {
        header.push(format!("snr_{protocol}"));
    }
    if config.include_baselines {
        match direction {
            Direction::Uplink => header.push("snr_conventional".to_string()),
            Direction::Downlink => {
                if with_pass1 {
                    header.push("snr_pass1".to_string());
                }
                header.push("snr_pass2".to_string());
            }
        }
    }
    header.push("error".to_string());
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let snr_columns = header.len() - 2;

    // ---- rows ----

    let stem = match direction {
        Direction::Uplink => "uplink_snr",
        Direction::Downlink => "downlink_snr",
    };
    prepare_dir(&args.out)?;
    let mut csv = CsvFile::new(&args.out, &format!("{stem}.csv"), &header_refs);
    for &value in &values {
        let mut cells = vec![float_cell(value)];
        match evaluate(direction, &config, variable, value, args, &radio, &budget) {
            Ok(snrs) => {
                cells.extend(snrs.iter().map(|&s| float_cell(s)));
                cells.push(String::new());
            }
            Err(message) => {
                for _ in 0..snr_columns {
                    cells.push(float_cell(f64::NAN));
                }
                cells.push(text_cell(&message));
            }
        }
        csv.push_row(&cells);
    }

    let outputs = vec![csv.finish()?];
    let resolved = serde_json::json!({
        "config": config,
        "sweep": variable.to_string(),
        "values": values,
        "user_x_m": args.ux,
        "user_y_m": args.uy,
    });
    write_manifest(&args.out, stem, resolved, Some(config.seed), &outputs, started)
}

/// SNR per column for one sweep value; an error message fails the row.
fn evaluate(
    direction: Direction,
    config: &ScenarioConfig,
    variable: SweepVariable,
    value: f64,
    args: &LinkSnrArgs,
    radio: &RadioConfig,
    budget: &LinkBudget,
) -> Result<Vec<f64>, String> {
    let (layout, n_override) = sweep_layout(config, variable, value).map_err(|e| e.to_string())?;
    let user = UserLocation::new(args.ux, args.uy, &layout);
    let mut snrs = Vec::new();
    match direction {
        Direction::Uplink => {
            for &protocol in &config.protocols {
                let snr = match protocol {
                    Protocol::Ss => {
                        let placement = ss_place(&user, &layout, radio, SsPlacementMode::Exact)
                            .map_err(|e| e.to_string())?;
                        ss_snr(&user, &placement, &layout, radio, budget)
                            .map_err(|e| e.to_string())?
                            .snr
                    }
                    Protocol::Sa => {
                        let placement =
                            sa_place(&user, &layout, radio).map_err(|e| e.to_string())?;
                        sa_snr(&user, &placement, &layout, radio, budget)
                            .map_err(|e| e.to_string())?
                            .snr
                    }
                    Protocol::Sm => {
                        let placement = sm_place(&user, &layout).map_err(|e| e.to_string())?;
                        sm_snr(&user, &placement, &layout, radio, budget)
                            .map_err(|e| e.to_string())?
                            .snr
                    }
                };
                snrs.push(snr);
            }
            if config.include_baselines {
                let report = conventional_uplink_snr(&user, &layout, radio, budget)
                    .map_err(|e| e.to_string())?;
                snrs.push(report.snr);
            }
        }
        Direction::Downlink => {
            let mut selection_count = None;
            for &protocol in &config.protocols {
                let placement = match n_override {
                    // Counts are per active segment: one for selection, all
                    // segments otherwise.
                    Some(n) => {
                        let counts = if protocol == Protocol::Ss {
                            vec![n]
                        } else {
                            vec![n; layout.num_segments]
                        };
                        dl_place(protocol, &user, &layout, radio, &counts)
                    }
                    None => dl_place_dense(protocol, &user, &layout, radio),
                }
                .map_err(|e| e.to_string())?;
                if protocol == Protocol::Ss {
                    selection_count = Some(placement.total_antennas());
                }
                let report = dl_snr(&user, &placement, &layout, radio, budget)
                    .map_err(|e| e.to_string())?;
                snrs.push(report.snr);
            }
            if config.include_baselines {
                let single = layout.as_single_waveguide();
                if let Some(n) = selection_count {
                    let placement = dl_place(Protocol::Ss, &user, &single, radio, &[n])
                        .map_err(|e| e.to_string())?;
                    let report = dl_snr(&user, &placement, &single, radio, budget)
                        .map_err(|e| e.to_string())?;
                    snrs.push(report.snr);
                }
                let placement =
                    dl_place_dense(Protocol::Ss, &user, &single, radio).map_err(|e| e.to_string())?;
                let report = dl_snr(&user, &placement, &single, radio, budget)
                    .map_err(|e| e.to_string())?;
                snrs.push(report.snr);
            }
        }
    }
    Ok(snrs)
}
