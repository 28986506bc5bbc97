use serde::{Deserialize, Serialize};

use crate::beam_model::ReceiverAperture;
use crate::codebook::{ArrayGeometry, DirectionCodebook, FocusCodebook};
use crate::error::{config, Result};
use crate::localizer::{AreaOfInterest, Link, Localizer, NoiseModel, SearchMode};
use crate::units;
use crate::Scalar;

/// Which direction codebook Phase 1 uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodebookChoice {
    Bfr,
    Rbfr,
}

impl std::str::FromStr for CodebookChoice {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bfr" => Ok(Self::Bfr),
            "rbfr" | "r-bfr" => Ok(Self::Rbfr),
            other => Err(config(format!("unknown codebook {other:?}"))),
        }
    }
}

/// Motion law for randomly generated tracking trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionModel<T> {
    /// Speed range, metres per timeslot.
    pub min_speed: T,
    pub max_speed: T,
    /// Shortest accepted path (m).
    pub min_path_length: T,
}

impl<T: Scalar> Default for MotionModel<T> {
    fn default() -> Self {
        Self {
            min_speed: T::of(0.05),
            max_speed: T::of(0.25),
            min_path_length: T::of(3.0),
        }
    }
}

/// Complete experiment configuration, in SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario<T> {
    pub name: String,
    pub max_distance: T,
    pub min_distance: T,
    /// Half-angle of the area of interest (rad).
    pub max_angle: T,
    pub carrier_hz: T,
    pub elements: usize,
    pub pitch_x: T,
    pub pitch_y: T,
    pub direction_levels: usize,
    pub focus_levels: usize,
    pub entry_level: usize,
    pub alpha: T,
    /// Transmit power (W).
    pub tx_power: T,
    /// Receiver antenna gain (linear).
    pub rx_gain: T,
    pub noise: NoiseModel<T>,
    pub codebook: CodebookChoice,
    pub freeze_level: usize,
    pub mode: SearchMode,
    pub motion: MotionModel<T>,
}

impl<T: Scalar> Scenario<T> {
    /// 5 m, ±25° area in front of a 1024-element half-wavelength array at
    /// 150 GHz; 10 direction levels entered at level 4, 6 focus levels.
    pub fn scenario1() -> Self {
        let carrier = T::of(150e9);
        let half = units::wavelength(carrier) / T::two();
        Self {
            name: "scenario1".into(),
            max_distance: T::of(5.0),
            min_distance: T::of(0.1),
            max_angle: T::of(25f64.to_radians()),
            carrier_hz: carrier,
            elements: 1024,
            pitch_x: half,
            pitch_y: half,
            direction_levels: 10,
            focus_levels: 6,
            entry_level: 4,
            alpha: T::of(0.3),
            tx_power: units::dbm_to_watts(T::of(30.0)),
            rx_gain: units::db_to_linear(T::of(20.0)),
            noise: NoiseModel::None,
            codebook: CodebookChoice::Bfr,
            freeze_level: 7,
            mode: SearchMode::Measured,
            motion: MotionModel::default(),
        }
    }

    /// Same as [`Scenario::scenario1`] with a 10 m area.
    pub fn scenario2() -> Self {
        Self {
            name: "scenario2".into(),
            max_distance: T::of(10.0),
            ..Self::scenario1()
        }
    }

    pub fn scenario1_track() -> Self {
        Self {
            name: "scenario1-track".into(),
            ..Self::scenario1()
        }
    }

    /// Tracking in the 10 m area uses a 2048-element array and 7 focus levels.
    pub fn scenario2_track() -> Self {
        Self {
            name: "scenario2-track".into(),
            elements: 2048,
            direction_levels: 11,
            focus_levels: 7,
            ..Self::scenario2()
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "scenario1" => Ok(Self::scenario1()),
            "scenario2" => Ok(Self::scenario2()),
            "scenario1-track" => Ok(Self::scenario1_track()),
            "scenario2-track" => Ok(Self::scenario2_track()),
            other => Err(config(format!("unknown preset {other:?}"))),
        }
    }

    pub fn with_noise(mut self, noise: NoiseModel<T>) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_noise_dbm(self, dbm: T) -> Self {
        self.with_noise(NoiseModel::Awgn {
            power: units::dbm_to_watts(dbm),
        })
    }

    pub fn with_codebook(mut self, codebook: CodebookChoice) -> Self {
        self.codebook = codebook;
        self
    }

    pub fn with_mode(mut self, mode: SearchMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_focus_levels(mut self, levels: usize) -> Self {
        self.focus_levels = levels;
        self
    }

    pub fn area(&self) -> Result<AreaOfInterest<T>> {
        AreaOfInterest::new(self.min_distance, self.max_distance, self.max_angle)
    }

    pub fn geometry(&self) -> Result<ArrayGeometry<T>> {
        ArrayGeometry::new(self.elements, self.pitch_x, self.pitch_y, self.carrier_hz)
    }

    pub fn validate(&self) -> Result<()> {
        self.area()?;
        let geometry = self.geometry()?;
        if self.direction_levels != geometry.levels() {
            return Err(config(format!(
                "{} elements need {} direction levels, got {}",
                self.elements,
                geometry.levels(),
                self.direction_levels
            )));
        }
        if self.entry_level == 0 || self.entry_level > self.direction_levels {
            return Err(config(format!(
                "entry level {} out of range",
                self.entry_level
            )));
        }
        if self.focus_levels == 0 {
            return Err(config("need at least one focus level"));
        }
        if !(self.alpha > T::zero()) {
            return Err(config(format!(
                "overlap coefficient must be positive, got {}",
                self.alpha
            )));
        }
        if !(self.tx_power > T::zero() && self.rx_gain > T::zero()) {
            return Err(config("powers and gains must be positive"));
        }
        if let NoiseModel::Awgn { power } = self.noise {
            if !(power >= T::zero()) {
                return Err(config(format!(
                    "noise power must be non-negative, got {power}"
                )));
            }
        }
        if self.codebook == CodebookChoice::Rbfr
            && (self.freeze_level == 0 || self.freeze_level > self.direction_levels)
        {
            return Err(config(format!(
                "freeze level {} out of range",
                self.freeze_level
            )));
        }
        let m = &self.motion;
        if !(m.min_speed >= T::zero()
            && m.min_speed <= m.max_speed
            && m.min_path_length >= T::zero())
        {
            return Err(config("invalid motion model"));
        }
        Ok(())
    }

    pub fn direction_codebook(&self) -> Result<DirectionCodebook<T>> {
        let bfr = DirectionCodebook::bfr(self.geometry()?, self.direction_levels)?;
        match self.codebook {
            CodebookChoice::Bfr => Ok(bfr),
            CodebookChoice::Rbfr => DirectionCodebook::robust(&bfr, self.freeze_level),
        }
    }

    pub fn focus_codebook(&self) -> Result<FocusCodebook<T>> {
        let k = self.geometry()?.wavenumber();
        FocusCodebook::new(self.max_distance, self.alpha, self.focus_levels, k)
    }

    /// Ranging resolution `α d_0 / 2^(L_r - 1)`, the success threshold.
    pub fn resolution(&self) -> T {
        self.alpha * self.max_distance / T::of(2f64.powi(self.focus_levels as i32 - 1))
    }

    pub fn localizer(&self) -> Result<Localizer<T>> {
        self.validate()?;
        let geometry = self.geometry()?;
        let link = Link {
            tx_power: self.tx_power,
            aperture: ReceiverAperture::new(self.rx_gain, geometry.wavelength())?,
            noise: self.noise,
        };
        Localizer::new(
            self.direction_codebook()?,
            self.focus_codebook()?,
            link,
            self.entry_level,
            self.area()?,
        )
    }
}
