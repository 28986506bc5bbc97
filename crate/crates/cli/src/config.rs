//! Scenario configuration files in user units (dBm, dBi, degrees).
//!
//! A file either spells out a whole scenario or names a `preset` and
//! overrides some of its fields.

use std::path::Path;

use beamloc::harness::{CodebookChoice, MotionModel, Scenario};
use beamloc::localizer::{NoiseModel, SearchMode};
use beamloc::units;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const PRESETS: &[(&str, &str)] = &[
    ("scenario1", include_str!("../presets/scenario1.json")),
    ("scenario2", include_str!("../presets/scenario2.json")),
    (
        "scenario1-track",
        include_str!("../presets/scenario1-track.json"),
    ),
    (
        "scenario2-track",
        include_str!("../presets/scenario2-track.json"),
    ),
];

/// `"none"` (noiseless) or a noise power in dBm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoiseSetting {
    Dbm(f64),
    Keyword(NoiseKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKeyword {
    None,
}

impl std::str::FromStr for NoiseSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("none") {
            return Ok(Self::Keyword(NoiseKeyword::None));
        }
        s.parse::<f64>()
            .map(Self::Dbm)
            .map_err(|_| format!("expected a noise power in dBm or \"none\", got {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotionConfig {
    pub min_speed_m_per_slot: f64,
    pub max_speed_m_per_slot: f64,
    pub min_path_length_m: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub name: Option<String>,
    pub max_distance_m: Option<f64>,
    pub min_distance_m: Option<f64>,
    pub max_angle_deg: Option<f64>,
    pub carrier_hz: Option<f64>,
    pub elements: Option<usize>,
    /// Element pitch; half a wavelength when omitted.
    pub pitch_x_m: Option<f64>,
    pub pitch_y_m: Option<f64>,
    pub direction_levels: Option<usize>,
    pub focus_levels: Option<usize>,
    pub entry_level: Option<usize>,
    pub alpha: Option<f64>,
    pub tx_power_dbm: Option<f64>,
    pub rx_gain_dbi: Option<f64>,
    pub noise_dbm: Option<NoiseSetting>,
    pub codebook: Option<CodebookChoice>,
    pub freeze_level: Option<usize>,
    pub mode: Option<SearchMode>,
    pub motion: Option<MotionConfig>,
    /// Monte-Carlo iterations (or trajectories).
    pub n: Option<usize>,
    pub seed: Option<u64>,
}

macro_rules! overlay {
    ($top:expr, $base:expr, $($field:ident),+ $(,)?) => {
        RunConfig { $($field: $top.$field.or($base.$field)),+ }
    };
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn preset(name: &str) -> Result<Self, CliError> {
        let (_, text) = PRESETS.iter().find(|(n, _)| *n == name).ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            CliError::Config(format!(
                "unknown preset {name:?}; available: {}",
                names.join(", ")
            ))
        })?;
        Self::parse(text)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Fields set here win over those of `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        overlay!(
            self,
            base,
            preset,
            name,
            max_distance_m,
            min_distance_m,
            max_angle_deg,
            carrier_hz,
            elements,
            pitch_x_m,
            pitch_y_m,
            direction_levels,
            focus_levels,
            entry_level,
            alpha,
            tx_power_dbm,
            rx_gain_dbi,
            noise_dbm,
            codebook,
            freeze_level,
            mode,
            motion,
            n,
            seed,
        )
    }

    /// Fill unset fields from the named preset, if any.
    pub fn resolve_preset(self) -> Result<RunConfig, CliError> {
        match self.preset.clone() {
            None => Ok(self),
            Some(name) => {
                let base = Self::preset(&name)?;
                if base.preset.is_some() {
                    return Err(CliError::Config(format!(
                        "preset {name:?} refers to another preset"
                    )));
                }
                Ok(self.over(base))
            }
        }
    }

    /// Convert to SI and validate.
    pub fn scenario(&self) -> Result<Scenario<f64>, CliError> {
        fn need<T: Copy>(v: Option<T>, field: &str) -> Result<T, CliError> {
            v.ok_or_else(|| {
                CliError::Config(format!("missing field `{field}` (and no preset sets it)"))
            })
        }
        let carrier_hz = need(self.carrier_hz, "carrier_hz")?;
        if !(carrier_hz > 0.0) {
            return Err(CliError::Config(format!(
                "carrier_hz must be positive, got {carrier_hz}"
            )));
        }
        let half = units::wavelength(carrier_hz) / 2.0;
        let motion = self
            .motion
            .map_or_else(MotionModel::default, |m| MotionModel {
                min_speed: m.min_speed_m_per_slot,
                max_speed: m.max_speed_m_per_slot,
                min_path_length: m.min_path_length_m,
            });
        let noise = match self.noise_dbm {
            None | Some(NoiseSetting::Keyword(NoiseKeyword::None)) => NoiseModel::None,
            Some(NoiseSetting::Dbm(dbm)) => NoiseModel::Awgn {
                power: units::dbm_to_watts(dbm),
            },
        };
        let scenario = Scenario {
            name: self
                .name
                .clone()
                .or_else(|| self.preset.clone())
                .unwrap_or_else(|| "custom".into()),
            max_distance: need(self.max_distance_m, "max_distance_m")?,
            min_distance: need(self.min_distance_m, "min_distance_m")?,
            max_angle: need(self.max_angle_deg, "max_angle_deg")?.to_radians(),
            carrier_hz,
            elements: need(self.elements, "elements")?,
            pitch_x: self.pitch_x_m.unwrap_or(half),
            pitch_y: self.pitch_y_m.unwrap_or(half),
            direction_levels: need(self.direction_levels, "direction_levels")?,
            focus_levels: need(self.focus_levels, "focus_levels")?,
            entry_level: need(self.entry_level, "entry_level")?,
            alpha: need(self.alpha, "alpha")?,
            tx_power: units::dbm_to_watts(need(self.tx_power_dbm, "tx_power_dbm")?),
            rx_gain: units::db_to_linear(need(self.rx_gain_dbi, "rx_gain_dbi")?),
            noise,
            codebook: self.codebook.unwrap_or(CodebookChoice::Bfr),
            freeze_level: self.freeze_level.unwrap_or(7),
            mode: self.mode.unwrap_or(SearchMode::Measured),
            motion,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_match_the_library() {
        for (name, _) in PRESETS {
            let cfg = RunConfig::preset(name).unwrap();
            assert_eq!(
                cfg.scenario().unwrap(),
                Scenario::<f64>::preset(name).unwrap(),
                "{name}"
            );
        }
    }

    #[test]
    fn overrides_apply_over_preset() {
        let cfg = RunConfig::parse(
            r#"{"preset": "scenario2", "noise_dbm": -80, "mode": "perfect-phase1"}"#,
        )
        .unwrap()
        .resolve_preset()
        .unwrap();
        let s = cfg.scenario().unwrap();
        assert_eq!(s.max_distance, 10.0);
        assert_eq!(s.mode, SearchMode::PerfectPhase1);
        assert_eq!(s.name, "scenario2");
        match s.noise {
            NoiseModel::Awgn { power } => assert!((power / 1e-11 - 1.0).abs() < 1e-12),
            NoiseModel::None => panic!("noise not applied"),
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(
            RunConfig::parse(r#"{"preset": "scenario1", "nosie_dbm": -80}"#),
            Err(CliError::Config(_))
        ));
        assert!(RunConfig::parse(r#"{"motion": {"min_speed_m_per_slot": 0.1, "max_speed_m_per_slot": 0.2, "min_path_length_m": 3, "turn": 1}}"#).is_err());
    }

    #[test]
    fn missing_fields_reported() {
        let err = RunConfig::parse(r#"{"carrier_hz": 150e9}"#)
            .unwrap()
            .scenario()
            .unwrap_err();
        assert!(err.to_string().contains("max_distance_m"), "{err}");
    }

    #[test]
    fn noise_setting_parses() {
        assert_eq!(
            "none".parse::<NoiseSetting>().unwrap(),
            NoiseSetting::Keyword(NoiseKeyword::None)
        );
        assert_eq!(
            "-90".parse::<NoiseSetting>().unwrap(),
            NoiseSetting::Dbm(-90.0)
        );
        assert!("loud".parse::<NoiseSetting>().is_err());
    }
}
