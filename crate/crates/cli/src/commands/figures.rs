//! Published result sets regenerated by tag.
//!
//! Tags map to fixed experiment definitions; the scenario file supplies the
//! shared parameters (radio, power, trials, seed) and each figure pins the
//! geometry, protocols, and sweep it needs:
//!
//! - fig5a: average in-waveguide gain vs span, selection protocol, 1 m
//!   segments, random user x at y = 0, against the single-waveguide array
//!   and the closed-form average.
//! - fig5b: mean selection rate vs span, lossless and lossy cases.
//! - fig6a: aggregation SNR vs segment count at spans 50/100/200 m, zero
//!   loss, user at the origin, with both closed-form approximations.
//! - fig6b: aggregation SNR vs span at segment lengths 0.5/1/2 m.
//! - fig7: closed-form average selection gain vs segment count.
//! - fig8: multiplexing SNR vs span with its approximations and bounds.
//! - fig9: uplink mean rates vs span for all protocols, both loss cases.
//! - fig10: downlink selection SNR vs segment count at a 200 m span with
//!   dense antenna fill, against the matched single-waveguide baseline.
//! - fig11: downlink mean rates vs span, dense fill, both loss cases.

use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use swan_core::{
    avg_gain_ss, conventional_uplink_snr, dl_place, dl_place_dense, dl_snr, dl_ss_approx,
    gain_ratio, inwaveguide_coeff, run_sweep, sa_place, sa_snr, sa_uplink_approx, sm_place,
    sm_snr, sm_uplink_approx, ss_place, ApproxParams, Direction, LinkBudget, Protocol,
    SaApproxVariant, SmApproxVariant, SsPlacementMode, SweepVariable, UserLocation,
    WaveguideLayout,
};

use crate::commands::rate_sweep::write_curve_files;
use crate::error::{CliError, CliResult};
use crate::output::{float_cell, int_cell, prepare_dir, write_manifest, CsvFile};
use crate::scenario::{self, ScenarioFile};
use crate::ReproduceFigureArgs;

pub fn run(args: &ReproduceFigureArgs, started: Instant) -> CliResult<()> {
    let mut file = scenario::load(args.scenario.as_deref())?;
    file.apply_overrides(&args.set)?;
    let workers = scenario::workers_from_env()?;
    prepare_dir(&args.out)?;
    let outputs = match args.tag.as_str() {
        "fig5a" => fig5a(&file, &args.out)?,
        "fig5b" => fig5b(&file, workers, &args.out)?,
        "fig6a" => fig6a(&file, &args.out)?,
        "fig6b" => fig6b(&file, &args.out)?,
        "fig7" => fig7(&file, &args.out)?,
        "fig8" => fig8(&file, &args.out)?,
        "fig9" => fig9(&file, workers, &args.out)?,
        "fig10" => fig10(&file, &args.out)?,
        "fig11" => fig11(&file, workers, &args.out)?,
        other => {
            return Err(CliError::Usage(format!(
                "unknown figure tag '{other}', expected fig5a, fig5b, fig6a, fig6b, fig7, fig8, fig9, fig10, or fig11"
            )))
        }
    };
    let resolved = serde_json::json!({
        "tag": args.tag,
        "scenario": file,
    });
    write_manifest(&args.out, &args.tag, resolved, Some(file.run.seed), &outputs, started)
}

fn core_err(err: swan_core::Error) -> CliError {
    CliError::Runtime(err.to_string())
}

fn config_err(err: swan_core::Error) -> CliError {
    CliError::Config(err.to_string())
}

fn budget_of(file: &ScenarioFile) -> CliResult<LinkBudget> {
    LinkBudget::new(
        scenario::dbm_to_watts(file.power.tx_dbm),
        scenario::dbm_to_watts(file.power.noise_dbm),
    )
    .map_err(config_err)
}

/// Per-trial random stream, split by sweep value and trial index.
fn trial_rng(seed: u64, value_idx: usize, trial: usize) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(((value_idx as u64) << 32) | trial as u64);
    rng
}

/// Prepares a figure sweep scenario for one protocol set and loss case.
fn case_scenario(
    file: &ScenarioFile,
    direction: Direction,
    protocols: &[Protocol],
    lossy: bool,
) -> ScenarioFile {
    let mut file = file.clone();
    file.run.direction = direction;
    file.run.protocols = protocols.to_vec();
    file.run.lossy = lossy;
    file.run.include_baselines = true;
    file
}

/// Runs one loss case of a span sweep and writes its curve files.
fn sweep_case(
    file: &ScenarioFile,
    workers: usize,
    values: &[f64],
    dir: &Path,
    prefix: &str,
) -> CliResult<Vec<String>> {
    let config = file.resolve(workers)?;
    let result = run_sweep(&config, SweepVariable::Dx, values).map_err(config_err)?;
    write_curve_files(&result, SweepVariable::Dx, dir, prefix)
}

fn span_values(from: f64, to: f64, step: f64) -> Vec<f64> {
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| from + step * i as f64).collect()
}

// ---- fig5a: selection gain vs span ----

fn fig5a(file: &ScenarioFile, dir: &Path) -> CliResult<Vec<String>> {
    let radio = file.radio()?;
    let delta = file
        .layout
        .min_spacing_m
        .unwrap_or(radio.wavelength_m / 2.0);
    let length = file.layout.segment_length_m;
    let trials = file.run.trials;
    let mut csv = CsvFile::new(
        dir,
        "fig5a.csv",
        &[
            "dx",
            "gain_selection_exact",
            "gain_selection_projection",
            "gain_conventional",
            "gain_theory",
        ],
    );
    for (idx, dx) in span_values(20.0, 500.0, 20.0).into_iter().enumerate() {
        let m = (dx / length).round().max(1.0) as usize;
        let layout = WaveguideLayout::centered(
            m,
            length,
            file.layout.lateral_offset_m,
            file.layout.height_m,
            delta,
        )
        .map_err(core_err)?;
        let single = layout.as_single_waveguide();
        let (mut sum_exact, mut sum_projection, mut sum_conv) = (0.0, 0.0, 0.0);
        for trial in 0..trials {
            let mut rng = trial_rng(file.run.seed, idx, trial);
            let u_x = (rng.gen::<f64>() - 0.5) * dx;
            let user = UserLocation::new(u_x, 0.0, &layout);
            for (mode, sum) in [
                (SsPlacementMode::Exact, &mut sum_exact),
                (SsPlacementMode::Projection, &mut sum_projection),
            ] {
                let placement = ss_place(&user, &layout, &radio, mode).map_err(core_err)?;
                let segment = placement
                    .selected_segment
                    .expect("selection placement carries its segment");
                *sum += inwaveguide_coeff(
                    placement.positions_m[0],
                    layout.feed_x(segment),
                    &radio,
                )
                .norm_sqr();
            }
            sum_conv += inwaveguide_coeff(u_x, single.feed_x(1), &radio).norm_sqr();
        }
        let n = trials as f64;
        let theory = avg_gain_ss(m as f64, dx, radio.alpha_per_m).map_err(core_err)?;
        csv.push_row(&[
            float_cell(dx),
            float_cell(sum_exact / n),
            float_cell(sum_projection / n),
            float_cell(sum_conv / n),
            float_cell(theory),
        ]);
    }
    Ok(vec![csv.finish()?])
}

// ---- fig5b: selection rate vs span ----

fn fig5b(file: &ScenarioFile, workers: usize, dir: &Path) -> CliResult<Vec<String>> {
    let values = span_values(20.0, 500.0, 20.0);
    let lossless = case_scenario(file, Direction::Uplink, &[Protocol::Ss], false);
    let lossy = case_scenario(file, Direction::Uplink, &[Protocol::Ss], true);
    let mut outputs = sweep_case(&lossless, workers, &values, dir, "fig5b_case1")?;
    outputs.extend(sweep_case(&lossy, workers, &values, dir, "fig5b_case2")?);
    Ok(outputs)
}

// ---- fig6a and fig6b: aggregation SNR ----

fn fig6a(file: &ScenarioFile, dir: &Path) -> CliResult<Vec<String>> {
    let radio = file.radio()?.lossless();
    let budget = budget_of(file)?;
    let delta = radio.wavelength_m / 2.0;
    let height = file.layout.height_m;
    let c_y = height * height;
    let mut outputs = Vec::new();
    for dx in [50.0, 100.0, 200.0] {
        let mut csv = CsvFile::new(
            dir,
            &format!("fig6a_dx{dx}.csv"),
            &["m", "snr_exact", "snr_approx1", "snr_approx2", "snr_conventional"],
        );
        for m in (1..=101usize).step_by(2) {
            let length = dx / m as f64;
            let layout = WaveguideLayout::centered(m, length, 0.0, height, delta)
                .map_err(core_err)?;
            let user = UserLocation::new(0.0, 0.0, &layout);
            let placement = sa_place(&user, &layout, &radio).map_err(core_err)?;
            let exact = sa_snr(&user, &placement, &layout, &radio, &budget)
                .map_err(core_err)?
                .snr;
            let params = ApproxParams::new(m, length, c_y, delta).map_err(core_err)?;
            let approx1 =
                sa_uplink_approx(SaApproxVariant::Lemma2, &params, &budget, radio.eta_m2)
                    .map_err(core_err)?;
            let approx2 =
                sa_uplink_approx(SaApproxVariant::FixedDx, &params, &budget, radio.eta_m2)
                    .map_err(core_err)?;
            let conv = conventional_uplink_snr(
                &user,
                &layout.as_single_waveguide(),
                &radio,
                &budget,
            )
            .map_err(core_err)?
            .snr;
            csv.push_row(&[
                int_cell(m),
                float_cell(exact),
                float_cell(approx1),
                float_cell(approx2),
                float_cell(conv),
            ]);
        }
        outputs.push(csv.finish()?);
    }
    Ok(outputs)
}

fn fig6b(file: &ScenarioFile, dir: &Path) -> CliResult<Vec<String>> {
    let radio = file.radio()?.lossless();
    let budget = budget_of(file)?;
    let delta = radio.wavelength_m / 2.0;
    let height = file.layout.height_m;
    let c_y = height * height;
    let mut outputs = Vec::new();
    for length in [0.5, 1.0, 2.0] {
        let mut csv = CsvFile::new(
            dir,
            &format!("fig6b_l{length}.csv"),
            &["dx", "m", "snr_exact", "snr_approx1", "snr_approx3", "snr_conventional"],
        );
        for m in (11..=501usize).step_by(10) {
            let dx = m as f64 * length;
            let layout = WaveguideLayout::centered(m, length, 0.0, height, delta)
                .map_err(core_err)?;
            let user = UserLocation::new(0.0, 0.0, &layout);
            let placement = sa_place(&user, &layout, &radio).map_err(core_err)?;
            let exact = sa_snr(&user, &placement, &layout, &radio, &budget)
                .map_err(core_err)?
                .snr;
            let params = ApproxParams::new(m, length, c_y, delta).map_err(core_err)?;
            let approx1 =
                sa_uplink_approx(SaApproxVariant::Lemma2, &params, &budget, radio.eta_m2)
                    .map_err(core_err)?;
            let approx3 =
                sa_uplink_approx(SaApproxVariant::FixedL, &params, &budget, radio.eta_m2)
                    .map_err(core_err)?;
            let conv = conventional_uplink_snr(
                &user,
                &layout.as_single_waveguide(),
                &radio,
                &budget,
            )
            .map_err(core_err)?
            .snr;
            csv.push_row(&[
                float_cell(dx),
                int_cell(m),
                float_cell(exact),
                float_cell(approx1),
                float_cell(approx3),
                float_cell(conv),
            ]);
        }
        outputs.push(csv.finish()?);
    }
    Ok(outputs)
}

// ---- fig7: closed-form selection gain ----

fn fig7(file: &ScenarioFile, dir: &Path) -> CliResult<Vec<String>> {
    let radio = file.radio()?;
    let dx = file.layout.num_segments as f64 * file.layout.segment_length_m;
    let mut csv = CsvFile::new(dir, "fig7.csv", &["M", "A_ss", "A_conv", "ratio"]);
    let a_conv = avg_gain_ss(1.0, dx, radio.alpha_per_m).map_err(core_err)?;
    for m in 1..=64usize {
        let a_ss = avg_gain_ss(m as f64, dx, radio.alpha_per_m).map_err(core_err)?;
        let ratio = gain_ratio(m as f64, dx, radio.alpha_per_m).map_err(core_err)?;
        csv.push_row(&[
            int_cell(m),
            float_cell(a_ss),
            float_cell(a_conv),
            float_cell(ratio),
        ]);
    }
    Ok(vec![csv.finish()?])
}

// ---- fig8: multiplexing SNR vs span ----

fn fig8(file: &ScenarioFile, dir: &Path) -> CliResult<Vec<String>> {
    let radio = file.radio()?.lossless();
    let budget = budget_of(file)?;
    let delta = radio.wavelength_m / 2.0;
    let height = file.layout.height_m;
    let c_y = height * height;
    let length = file.layout.segment_length_m;
    let mut csv = CsvFile::new(
        dir,
        "fig8.csv",
        &[
            "dx",
            "m",
            "snr_exact",
            "snr_approx1",
            "snr_approx2",
            "snr_upper",
            "snr_limit",
            "snr_conventional",
        ],
    );
    for m in (11..=401usize).step_by(10) {
        let dx = m as f64 * length;
        let layout =
            WaveguideLayout::centered(m, length, 0.0, height, delta).map_err(core_err)?;
        let user = UserLocation::new(0.0, 0.0, &layout);
        let placement = sm_place(&user, &layout).map_err(core_err)?;
        let exact = sm_snr(&user, &placement, &layout, &radio, &budget)
            .map_err(core_err)?
            .snr;
        let params = ApproxParams::new(m, length, c_y, delta).map_err(core_err)?;
        let variant = |v| sm_uplink_approx(v, &params, &budget, radio.eta_m2).map_err(core_err);
        let approx1 = variant(SmApproxVariant::Full)?;
        let approx2 = variant(SmApproxVariant::Simplified)?;
        let upper = variant(SmApproxVariant::Upper)?;
        let limit = variant(SmApproxVariant::Limit)?;
        let conv = conventional_uplink_snr(&user, &layout.as_single_waveguide(), &radio, &budget)
            .map_err(core_err)?
            .snr;
        csv.push_row(&[
            float_cell(dx),
            int_cell(m),
            float_cell(exact),
            float_cell(approx1),
            float_cell(approx2),
            float_cell(upper),
            float_cell(limit),
            float_cell(conv),
        ]);
    }
    Ok(vec![csv.finish()?])
}

// ---- fig9: uplink rates vs span ----

fn fig9(file: &ScenarioFile, workers: usize, dir: &Path) -> CliResult<Vec<String>> {
    let values = span_values(20.0, 200.0, 20.0);
    let protocols = [Protocol::Ss, Protocol::Sa, Protocol::Sm];
    let lossless = case_scenario(file, Direction::Uplink, &protocols, false);
    let lossy = case_scenario(file, Direction::Uplink, &protocols, true);
    let mut outputs = sweep_case(&lossless, workers, &values, dir, "fig9_case1")?;
    outputs.extend(sweep_case(&lossy, workers, &values, dir, "fig9_case2")?);
    Ok(outputs)
}

// ---- fig10: downlink selection SNR vs segment count ----

fn fig10(file: &ScenarioFile, dir: &Path) -> CliResult<Vec<String>> {
    let radio = file.radio()?;
    let lossless = radio.lossless();
    let budget = budget_of(file)?;
    let delta = radio.wavelength_m / 2.0;
    let height = file.layout.height_m;
    let c_y = height * height;
    let dx = 200.0;
    let trials = file.run.trials;
    let mut csv = CsvFile::new(
        dir,
        "fig10.csv",
        &[
            "m",
            "segment_length",
            "n_pas",
            "snr_swan_case1",
            "snr_swan_case2",
            "snr_pass_case1",
            "snr_pass_case2",
            "snr_theory",
        ],
    );
    let counts = [2usize, 4, 5, 8, 10, 16, 20, 25, 40, 50, 80, 100, 200];
    for (idx, &m) in counts.iter().enumerate() {
        let length = dx / m as f64;
        let layout =
            WaveguideLayout::centered(m, length, 0.0, height, delta).map_err(core_err)?;
        let single = layout.as_single_waveguide();
        let mut n_pas = 0usize;
        let mut sums = [0.0f64; 4];
        for trial in 0..trials {
            let mut rng = trial_rng(file.run.seed, idx, trial);
            let u_x = (rng.gen::<f64>() - 0.5) * dx;
            let user = UserLocation::new(u_x, 0.0, &layout);
            let swan = dl_place_dense(Protocol::Ss, &user, &layout, &radio).map_err(core_err)?;
            n_pas = swan.total_antennas();
            let pass =
                dl_place(Protocol::Ss, &user, &single, &radio, &[n_pas]).map_err(core_err)?;
            sums[0] += dl_snr(&user, &swan, &layout, &lossless, &budget)
                .map_err(core_err)?
                .snr;
            sums[1] += dl_snr(&user, &swan, &layout, &radio, &budget)
                .map_err(core_err)?
                .snr;
            sums[2] += dl_snr(&user, &pass, &single, &lossless, &budget)
                .map_err(core_err)?
                .snr;
            sums[3] += dl_snr(&user, &pass, &single, &radio, &budget)
                .map_err(core_err)?
                .snr;
        }
        let n = trials as f64;
        let params = ApproxParams::new(1, length, c_y, delta).map_err(core_err)?;
        let theory = dl_ss_approx(n_pas, &params, &budget, radio.eta_m2).map_err(core_err)?;
        csv.push_row(&[
            int_cell(m),
            float_cell(length),
            int_cell(n_pas),
            float_cell(sums[0] / n),
            float_cell(sums[1] / n),
            float_cell(sums[2] / n),
            float_cell(sums[3] / n),
            float_cell(theory),
        ]);
    }
    Ok(vec![csv.finish()?])
}

// ---- fig11: downlink rates vs span ----

fn fig11(file: &ScenarioFile, workers: usize, dir: &Path) -> CliResult<Vec<String>> {
    let values = span_values(20.0, 200.0, 20.0);
    let protocols = [Protocol::Ss, Protocol::Sa, Protocol::Sm];
    let mut file = file.clone();
    file.run.antennas_per_segment = None;
    let lossless = case_scenario(&file, Direction::Downlink, &protocols, false);
    let lossy = case_scenario(&file, Direction::Downlink, &protocols, true);
    let mut outputs = sweep_case(&lossless, workers, &values, dir, "fig11_case1")?;
    outputs.extend(sweep_case(&lossy, workers, &values, dir, "fig11_case2")?);
    Ok(outputs)
}
