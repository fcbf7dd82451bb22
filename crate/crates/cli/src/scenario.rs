//! Scenario files and command-line overrides.
//!
//! Scenarios are TOML documents with `[radio]`, `[layout]`, `[power]`,
//! `[region]`, and `[run]` sections. Every key has a default matching the
//! reference deployment (28 GHz carrier, refractive index 1.4, loss
//! 0.08 dB/m, 100 segments of 1 m, 10 dBm transmit power, -90 dBm noise,
//! 20 m region depth, 1000 trials), so an empty or absent file is a valid
//! scenario. Power levels are accepted in dBm at this boundary and
//! converted to watts once; everything past this point is SI linear.
//!
//! Overrides use dotted keys, for example `--set run.trials=200` or
//! `--set radio.kappa_db_per_m=0`. Unknown keys are usage errors.

use std::path::Path;

use serde::{Deserialize, Serialize};
use swan_core::{make_radio_config, Direction, Protocol, RadioConfig, ScenarioConfig};

use crate::error::{CliError, CliResult};

// ---- file schema ----

/// Parsed scenario file with defaults filled in.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioFile {
    pub radio: RadioSection,
    pub layout: LayoutSection,
    pub power: PowerSection,
    pub region: RegionSection,
    pub run: RunSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioSection {
    /// Carrier frequency [GHz].
    pub carrier_freq_ghz: f64,
    /// Effective refractive index of the waveguide.
    pub n_eff: f64,
    /// In-waveguide attenuation [dB/m].
    pub kappa_db_per_m: f64,
}

impl Default for RadioSection {
    fn default() -> Self {
        RadioSection {
            carrier_freq_ghz: 28.0,
            n_eff: 1.4,
            kappa_db_per_m: 0.08,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutSection {
    /// Number of waveguide segments.
    pub num_segments: usize,
    /// Length of each segment [m].
    pub segment_length_m: f64,
    /// Waveguide y coordinate [m].
    pub lateral_offset_m: f64,
    /// Waveguide height above the user plane [m].
    pub height_m: f64,
    /// Minimum antenna spacing [m]; defaults to half a wavelength.
    pub min_spacing_m: Option<f64>,
}

impl Default for LayoutSection {
    fn default() -> Self {
        LayoutSection {
            num_segments: 100,
            segment_length_m: 1.0,
            lateral_offset_m: 0.0,
            height_m: 3.0,
            min_spacing_m: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerSection {
    /// Transmit power [dBm].
    pub tx_dbm: f64,
    /// Noise power [dBm].
    pub noise_dbm: f64,
}

impl Default for PowerSection {
    fn default() -> Self {
        PowerSection {
            tx_dbm: 10.0,
            noise_dbm: -90.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegionSection {
    /// Service region depth along the y axis [m].
    pub depth_m: f64,
}

impl Default for RegionSection {
    fn default() -> Self {
        RegionSection { depth_m: 20.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    /// Monte Carlo trials per sweep value.
    pub trials: usize,
    /// Master seed for the per-trial random streams.
    pub seed: u64,
    /// Link direction.
    pub direction: Direction,
    /// Protocols to evaluate, in reporting order.
    pub protocols: Vec<Protocol>,
    /// Apply in-waveguide loss (false evaluates the lossless case).
    pub lossy: bool,
    /// Also evaluate the single-waveguide baselines.
    pub include_baselines: bool,
    /// Downlink antennas per active segment; absent means dense fill.
    pub antennas_per_segment: Option<usize>,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            trials: 1000,
            seed: 7,
            direction: Direction::Uplink,
            protocols: vec![Protocol::Ss, Protocol::Sa, Protocol::Sm],
            lossy: true,
            include_baselines: true,
            antennas_per_segment: None,
        }
    }
}

// ---- loading and overrides ----

/// Loads a scenario file, or the built-in defaults when no path is given.
pub fn load(path: Option<&Path>) -> CliResult<ScenarioFile> {
    let Some(path) = path else {
        return Ok(ScenarioFile::default());
    };
    let text = std::fs::read_to_string(path).map_err(|err| {
        CliError::Config(format!("cannot read scenario {}: {err}", path.display()))
    })?;
    toml::from_str(&text).map_err(|err| {
        CliError::Config(format!("cannot parse scenario {}: {err}", path.display()))
    })
}

impl ScenarioFile {
    /// Applies `section.key=value` overrides in order.
    pub fn apply_overrides(&mut self, sets: &[String]) -> CliResult<()> {
        for entry in sets {
            let (key, value) = entry.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("override '{entry}' is not of the form key=value"))
            })?;
            self.apply_one(key.trim(), value.trim())?;
        }
        Ok(())
    }

    fn apply_one(&mut self, key: &str, value: &str) -> CliResult<()> {
        match key {
            "radio.carrier_freq_ghz" => self.radio.carrier_freq_ghz = parse_f64(key, value)?,
            "radio.n_eff" => self.radio.n_eff = parse_f64(key, value)?,
            "radio.kappa_db_per_m" => self.radio.kappa_db_per_m = parse_f64(key, value)?,
            "layout.num_segments" => self.layout.num_segments = parse_usize(key, value)?,
            "layout.segment_length_m" => self.layout.segment_length_m = parse_f64(key, value)?,
            "layout.lateral_offset_m" => self.layout.lateral_offset_m = parse_f64(key, value)?,
            "layout.height_m" => self.layout.height_m = parse_f64(key, value)?,
            "layout.min_spacing_m" => self.layout.min_spacing_m = Some(parse_f64(key, value)?),
            "power.tx_dbm" => self.power.tx_dbm = parse_f64(key, value)?,
            "power.noise_dbm" => self.power.noise_dbm = parse_f64(key, value)?,
            "region.depth_m" => self.region.depth_m = parse_f64(key, value)?,
            "run.trials" => self.run.trials = parse_usize(key, value)?,
            "run.seed" => {
                self.run.seed = value.parse().map_err(|_| bad_value(key, value, "an integer"))?;
            }
            "run.direction" => {
                self.run.direction = match value {
                    "uplink" => Direction::Uplink,
                    "downlink" => Direction::Downlink,
                    _ => return Err(bad_value(key, value, "uplink or downlink")),
                };
            }
            "run.protocols" => {
                let mut protocols = Vec::new();
                for name in value.split(',') {
                    protocols.push(match name.trim() {
                        "ss" => Protocol::Ss,
                        "sa" => Protocol::Sa,
                        "sm" => Protocol::Sm,
                        other => {
                            return Err(bad_value(key, other, "a comma list of ss, sa, sm"))
                        }
                    });
                }
                self.run.protocols = protocols;
            }
            "run.lossy" => self.run.lossy = parse_bool(key, value)?,
            "run.include_baselines" => self.run.include_baselines = parse_bool(key, value)?,
            "run.antennas_per_segment" => {
                self.run.antennas_per_segment = if value == "dense" {
                    None
                } else {
                    Some(parse_usize(key, value)?)
                };
            }
            _ => return Err(CliError::Usage(format!("unknown override key '{key}'"))),
        }
        Ok(())
    }

    /// Builds the radio model, converting the boundary units once.
    pub fn radio(&self) -> CliResult<RadioConfig> {
        make_radio_config(
            self.radio.carrier_freq_ghz * 1e9,
            self.radio.n_eff,
            self.radio.kappa_db_per_m,
        )
        .map_err(|err| CliError::Config(err.to_string()))
    }

    /// Resolves the file into a validated simulation configuration.
    pub fn resolve(&self, workers: usize) -> CliResult<ScenarioConfig> {
        let radio = self.radio()?;
        let config = ScenarioConfig {
            carrier_freq_hz: self.radio.carrier_freq_ghz * 1e9,
            n_eff: self.radio.n_eff,
            kappa_db_per_m: self.radio.kappa_db_per_m,
            num_segments: self.layout.num_segments,
            segment_length_m: self.layout.segment_length_m,
            lateral_offset_m: self.layout.lateral_offset_m,
            height_m: self.layout.height_m,
            min_spacing_m: self
                .layout
                .min_spacing_m
                .unwrap_or(radio.wavelength_m / 2.0),
            tx_power_w: dbm_to_watts(self.power.tx_dbm),
            noise_power_w: dbm_to_watts(self.power.noise_dbm),
            region_depth_m: self.region.depth_m,
            trials: self.run.trials,
            seed: self.run.seed,
            direction: self.run.direction,
            protocols: self.run.protocols.clone(),
            lossy: self.run.lossy,
            antennas_per_segment: self.run.antennas_per_segment,
            include_baselines: self.run.include_baselines,
            workers,
        };
        config
            .validate()
            .map_err(|err| CliError::Config(err.to_string()))?;
        Ok(config)
    }
}

// ---- helpers ----

/// Converts a dBm level to watts; 10 dBm is 10 mW.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Worker count from the SWAN_THREADS environment variable; 0 or unset
/// leaves the thread count automatic.
pub fn workers_from_env() -> CliResult<usize> {
    match std::env::var("SWAN_THREADS") {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("SWAN_THREADS must be a non-negative integer, got '{text}'"))),
        Err(std::env::VarError::NotPresent) => Ok(0),
        Err(err) => Err(CliError::Usage(format!("SWAN_THREADS is not readable: {err}"))),
    }
}

fn bad_value(key: &str, value: &str, expected: &str) -> CliError {
    CliError::Usage(format!("override {key}: expected {expected}, got '{value}'"))
}

fn parse_f64(key: &str, value: &str) -> CliResult<f64> {
    value.parse().map_err(|_| bad_value(key, value, "a number"))
}

fn parse_usize(key: &str, value: &str) -> CliResult<usize> {
    value
        .parse()
        .map_err(|_| bad_value(key, value, "a non-negative integer"))
}

fn parse_bool(key: &str, value: &str) -> CliResult<bool> {
    value.parse().map_err(|_| bad_value(key, value, "true or false"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve_to_the_reference_deployment() {
        let config = ScenarioFile::default().resolve(0).unwrap();
        assert!(
            (config.tx_power_w - 0.01).abs() < 1e-15,
            "expected 10 dBm to resolve to 0.01 W, got {}",
            config.tx_power_w
        );
        assert!(
            (config.noise_power_w - 1e-12).abs() < 1e-24,
            "expected -90 dBm to resolve to 1e-12 W, got {}",
            config.noise_power_w
        );
        assert_eq!(config.num_segments, 100);
        assert_eq!(config.trials, 1000);
        let radio = make_radio_config(28.0e9, 1.4, 0.08).unwrap();
        assert!(
            (config.min_spacing_m - radio.wavelength_m / 2.0).abs() < 1e-15,
            "expected half-wavelength spacing, got {}",
            config.min_spacing_m
        );
    }

    #[test]
    fn overrides_update_nested_keys() {
        let mut file = ScenarioFile::default();
        file.apply_overrides(&[
            "run.trials=25".to_string(),
            "radio.kappa_db_per_m=0".to_string(),
            "run.protocols=ss,sa".to_string(),
            "run.direction=downlink".to_string(),
            "run.antennas_per_segment=4".to_string(),
        ])
        .unwrap();
        assert_eq!(file.run.trials, 25);
        assert_eq!(file.radio.kappa_db_per_m, 0.0);
        assert_eq!(file.run.protocols, vec![Protocol::Ss, Protocol::Sa]);
        assert_eq!(file.run.direction, Direction::Downlink);
        assert_eq!(file.run.antennas_per_segment, Some(4));
        file.apply_overrides(&["run.antennas_per_segment=dense".to_string()])
            .unwrap();
        assert_eq!(file.run.antennas_per_segment, None);
    }

    #[test]
    fn unknown_override_key_is_a_usage_error() {
        let mut file = ScenarioFile::default();
        let err = file
            .apply_overrides(&["run.typo=1".to_string()])
            .unwrap_err();
        assert_eq!(err.exit_code(), 2, "expected exit 2, got {}", err.exit_code());
    }

    #[test]
    fn malformed_scenario_text_is_a_config_error() {
        let dir = std::env::temp_dir().join("swan-scenario-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("broken.toml");
        std::fs::write(&path, "[run]\ntrials = \"many\"\n").unwrap();
        let err = load(Some(&path)).unwrap_err();
        assert_eq!(err.exit_code(), 3, "expected exit 3, got {}", err.exit_code());
        let missing = load(Some(Path::new("/nonexistent/swan.toml"))).unwrap_err();
        assert_eq!(missing.exit_code(), 3);
    }

    #[test]
    fn invalid_settings_fail_validation() {
        let mut file = ScenarioFile::default();
        file.run.trials = 0;
        let err = file.resolve(0).unwrap_err();
        assert_eq!(err.exit_code(), 3, "expected exit 3, got {}", err.exit_code());
    }
}
