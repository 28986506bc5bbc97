//! Two-phase hierarchical localization.
//!
//! Phase 1 descends the direction codebook from an entry level to the last
//! level, keeping the codeword with the highest received power at each step.
//! Phase 2 forms focused beams along the estimated direction and descends the
//! focus codebook the same way. The receiver is modelled as a power oracle:
//! every pilot returns the power predicted by the beam model, optionally
//! corrupted by additive white Gaussian noise.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::beam_model::{FocusedBeam, PlanePoint, ReceiverAperture};
use crate::codebook::{children, DirectionCodebook, FocusCodebook};
use crate::error::{config, domain, Error, Result};
use crate::Scalar;

/// True receiver position in polar form around the transmitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RxGroundTruth<T> {
    pub theta: T,
    pub distance: T,
}

impl<T: Scalar> RxGroundTruth<T> {
    pub fn new(theta: T, distance: T) -> Result<Self> {
        if !(distance > T::zero()) || !(theta.abs() < T::FRAC_PI_2()) {
            return Err(domain(format!(
                "receiver must lie in front of the panel, got d={distance}, θ={theta}"
            )));
        }
        Ok(Self { theta, distance })
    }

    pub fn from_point(p: PlanePoint<T>) -> Result<Self> {
        Self::new(p.angle(), p.distance())
    }

    pub fn cartesian(&self) -> PlanePoint<T> {
        PlanePoint::from_polar(self.distance, self.theta)
    }
}

/// Annular sector `d_min ≤ d ≤ d_0`, `|θ| ≤ θ_max` in which receivers live.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaOfInterest<T> {
    pub min_distance: T,
    pub max_distance: T,
    pub max_angle: T,
}

impl<T: Scalar> AreaOfInterest<T> {
    pub fn new(min_distance: T, max_distance: T, max_angle: T) -> Result<Self> {
        if !(min_distance >= T::zero() && min_distance < max_distance) {
            return Err(config(format!(
                "need 0 <= d_min < d_0, got d_min={min_distance}, d_0={max_distance}"
            )));
        }
        if !(max_angle > T::zero() && max_angle < T::FRAC_PI_2()) {
            return Err(config(format!(
                "maximum angle must be in (0, π/2), got {max_angle}"
            )));
        }
        Ok(Self {
            min_distance,
            max_distance,
            max_angle,
        })
    }

    pub fn contains(&self, rx: &RxGroundTruth<T>) -> bool {
        rx.distance >= self.min_distance
            && rx.distance <= self.max_distance
            && rx.theta.abs() <= self.max_angle
    }

    /// Clamp the angle to `±θ_max` and the distance to `[d_min, d_0]`.
    pub fn clamp(&self, p: PlanePoint<T>) -> PlanePoint<T> {
        let theta = p.angle().max(-self.max_angle).min(self.max_angle);
        let d = p.distance().max(self.min_distance).min(self.max_distance);
        PlanePoint::from_polar(d, theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel<T> {
    None,
    /// Circularly-symmetric complex Gaussian noise of average power `power` (W).
    Awgn {
        power: T,
    },
}

impl<T: Scalar> NoiseModel<T> {
    pub fn awgn(power: T) -> Result<Self> {
        if !(power >= T::zero()) {
            return Err(domain(format!(
                "noise power must be non-negative, got {power}"
            )));
        }
        Ok(NoiseModel::Awgn { power })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    /// Winners chosen from measured powers.
    Measured,
    /// Winners chosen from the true position; no measurements.
    Ideal,
    /// Exact direction handed to the ranging phase, which is measured.
    PerfectPhase1,
}

impl std::str::FromStr for SearchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "measured" => Ok(Self::Measured),
            "ideal" => Ok(Self::Ideal),
            "perfect-phase1" | "perfect_phase1" => Ok(Self::PerfectPhase1),
            other => Err(config(format!("unknown search mode {other:?}"))),
        }
    }
}

/// Transmit power, receiver antenna and noise shared by every pilot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Link<T> {
    pub tx_power: T,
    pub aperture: ReceiverAperture<T>,
    pub noise: NoiseModel<T>,
}

/// Received power of one pilot.
///
/// Without noise this is `S_r · A_r`. With AWGN the detector sees
/// `|sqrt(P_r) e^{jφ} + n|²` with a uniform phase `φ` and `E|n|² = P_n`.
pub fn measure<T: Scalar, R: Rng + ?Sized>(
    beam: &FocusedBeam<T>,
    rx: &RxGroundTruth<T>,
    aperture: &ReceiverAperture<T>,
    noise: &NoiseModel<T>,
    rng: &mut R,
) -> T {
    let p_r = aperture.received_power(beam.power_density(rx.cartesian()));
    match *noise {
        NoiseModel::None => p_r,
        NoiseModel::Awgn { power } => {
            let phase = rng.random::<f64>() * std::f64::consts::TAU;
            let sigma = (power.as_f64() / 2.0).sqrt();
            let n_re: f64 = StandardNormal.sample(rng);
            let n_im: f64 = StandardNormal.sample(rng);
            let amp = p_r.as_f64().sqrt();
            let re = amp * phase.cos() + sigma * n_re;
            let im = amp * phase.sin() + sigma * n_im;
            T::of(re * re + im * im)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Direction,
    Ranging,
}

/// One level of a search: the candidates probed and the winner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchStep<T> {
    pub phase: Phase,
    pub level: usize,
    pub candidates: Vec<usize>,
    /// Measured power per candidate; empty when winners come from an oracle.
    pub powers: Vec<T>,
    pub chosen: usize,
}

/// One pilot transmission, as exported in trace files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PilotRecord<T> {
    pub pilot: usize,
    pub phase: Phase,
    pub level: usize,
    pub index: usize,
    pub power_w: Option<T>,
    pub chosen: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchTrace<T> {
    pub steps: Vec<SearchStep<T>>,
}

impl<T: Scalar> SearchTrace<T> {
    pub fn pilots(&self) -> usize {
        self.steps.iter().map(|s| s.candidates.len()).sum()
    }

    pub fn records(&self) -> Vec<PilotRecord<T>> {
        let mut out = Vec::with_capacity(self.pilots());
        for step in &self.steps {
            for (k, &index) in step.candidates.iter().enumerate() {
                out.push(PilotRecord {
                    pilot: out.len(),
                    phase: step.phase,
                    level: step.level,
                    index,
                    power_w: step.powers.get(k).copied(),
                    chosen: index == step.chosen,
                });
            }
        }
        out
    }

    /// Trace as JSON lines, one record per pilot.
    pub fn to_json_lines(&self) -> Result<String> {
        let mut out = String::new();
        for r in self.records() {
            out.push_str(&serde_json::to_string(&r)?);
            out.push('\n');
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocationEstimate<T> {
    pub theta: T,
    pub distance: T,
    pub position: PlanePoint<T>,
    /// Euclidean distance to the true position (m).
    pub error: T,
}

impl<T: Scalar> LocationEstimate<T> {
    pub fn new(theta: T, distance: T, truth: &RxGroundTruth<T>) -> Self {
        let position = PlanePoint::from_polar(distance, theta);
        Self {
            theta,
            distance,
            position,
            error: position.distance_to(&truth.cartesian()),
        }
    }
}

/// Success means the error does not exceed the ranging resolution.
pub fn is_success<T: Scalar>(error: T, resolution: T) -> bool {
    error <= resolution
}

/// Index of the largest power; the first one wins ties.
fn argmax<T: Scalar>(powers: &[T]) -> usize {
    let mut best = 0;
    for (i, &p) in powers.iter().enumerate().skip(1) {
        if p > powers[best] {
            best = i;
        }
    }
    best
}

/// Index of the smallest value; the first one wins ties.
fn argmin<T: Scalar>(values: impl Iterator<Item = T>) -> usize {
    let mut best = (0, T::infinity());
    for (i, v) in values.enumerate() {
        if v < best.1 {
            best = (i, v);
        }
    }
    best.0
}

/// Codebooks plus link budget: everything needed to localize one receiver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Localizer<T> {
    direction: DirectionCodebook<T>,
    focus: FocusCodebook<T>,
    link: Link<T>,
    entry_level: usize,
    area: AreaOfInterest<T>,
}

impl<T: Scalar> Localizer<T> {
    pub fn new(
        direction: DirectionCodebook<T>,
        focus: FocusCodebook<T>,
        link: Link<T>,
        entry_level: usize,
        area: AreaOfInterest<T>,
    ) -> Result<Self> {
        if entry_level == 0 || entry_level > direction.depth() {
            return Err(config(format!(
                "entry level must be in 1..={}, got {entry_level}",
                direction.depth()
            )));
        }
        if !(link.tx_power > T::zero()) {
            return Err(config(format!(
                "transmit power must be positive, got {}",
                link.tx_power
            )));
        }
        Ok(Self {
            direction,
            focus,
            link,
            entry_level,
            area,
        })
    }

    pub fn direction_codebook(&self) -> &DirectionCodebook<T> {
        &self.direction
    }

    pub fn focus_codebook(&self) -> &FocusCodebook<T> {
        &self.focus
    }

    pub fn link(&self) -> &Link<T> {
        &self.link
    }

    pub fn entry_level(&self) -> usize {
        self.entry_level
    }

    pub fn area(&self) -> &AreaOfInterest<T> {
        &self.area
    }

    /// Ranging resolution, `r_max` of the last focus level.
    pub fn resolution(&self) -> T {
        self.focus.resolution()
    }

    fn wavenumber(&self) -> T {
        self.direction.geometry().wavenumber()
    }

    /// Received power of direction codeword `(level, index)`.
    pub fn measure_direction<R: Rng + ?Sized>(
        &self,
        level: usize,
        index: usize,
        rx: &RxGroundTruth<T>,
        rng: &mut R,
    ) -> T {
        let beam = self
            .direction
            .codeword(level, index)
            .beam(self.link.tx_power, self.wavenumber())
            .expect("codebook beams are valid by construction");
        measure(&beam, rx, &self.link.aperture, &self.link.noise, rng)
    }

    /// Received power of focus codeword `(level, index)` steered along `steering`.
    pub fn measure_focus<R: Rng + ?Sized>(
        &self,
        level: usize,
        index: usize,
        steering: T,
        rx: &RxGroundTruth<T>,
        rng: &mut R,
    ) -> T {
        let beam = self
            .focus
            .codeword(level, index)
            .beam(self.link.tx_power, steering, self.wavenumber())
            .expect("steering stays inside the codebook's angular range");
        measure(&beam, rx, &self.link.aperture, &self.link.noise, rng)
    }

    /// Descend the direction codebook from `(level, candidates)` to the last
    /// level. Returns the final winning index.
    pub fn descend_direction<R: Rng + ?Sized>(
        &self,
        mut level: usize,
        mut candidates: Vec<usize>,
        rx: &RxGroundTruth<T>,
        ideal: bool,
        rng: &mut R,
        trace: &mut SearchTrace<T>,
    ) -> usize {
        let u = rx.theta.sin();
        loop {
            let (chosen, powers) = if ideal {
                let i = argmin(
                    candidates
                        .iter()
                        .map(|&i| (self.direction.codeword(level, i).u_center - u).abs()),
                );
                (candidates[i], Vec::new())
            } else {
                let powers: Vec<T> = candidates
                    .iter()
                    .map(|&i| self.measure_direction(level, i, rx, rng))
                    .collect();
                (candidates[argmax(&powers)], powers)
            };
            trace.steps.push(SearchStep {
                phase: Phase::Direction,
                level,
                candidates,
                powers,
                chosen,
            });
            if level == self.direction.depth() {
                return chosen;
            }
            let (a, b) = children(chosen);
            candidates = vec![a, b];
            level += 1;
        }
    }

    /// Descend the focus codebook along `steering` from `(level, candidates)`
    /// to the last level. Returns the final winning index.
    #[allow(clippy::too_many_arguments)]
    pub fn descend_range<R: Rng + ?Sized>(
        &self,
        steering: T,
        mut level: usize,
        mut candidates: Vec<usize>,
        rx: &RxGroundTruth<T>,
        ideal: bool,
        rng: &mut R,
        trace: &mut SearchTrace<T>,
    ) -> usize {
        loop {
            let (chosen, powers) = if ideal {
                let i =
                    argmin(candidates.iter().map(|&i| {
                        (self.focus.codeword(level, i).focal_distance - rx.distance).abs()
                    }));
                (candidates[i], Vec::new())
            } else {
                let powers: Vec<T> = candidates
                    .iter()
                    .map(|&i| self.measure_focus(level, i, steering, rx, rng))
                    .collect();
                (candidates[argmax(&powers)], powers)
            };
            trace.steps.push(SearchStep {
                phase: Phase::Ranging,
                level,
                candidates,
                powers,
                chosen,
            });
            if level == self.focus.depth() {
                return chosen;
            }
            let (a, b) = children(chosen);
            candidates = vec![a, b];
            level += 1;
        }
    }

    /// Beam training: returns the estimated direction (rad).
    pub fn phase1<R: Rng + ?Sized>(
        &self,
        rx: &RxGroundTruth<T>,
        ideal: bool,
        rng: &mut R,
        trace: &mut SearchTrace<T>,
    ) -> T {
        let entry = self
            .direction
            .entry_codewords(self.entry_level, self.area.max_angle)
            .expect("entry level validated at construction");
        let winner = self.descend_direction(self.entry_level, entry, rx, ideal, rng, trace);
        self.direction
            .codeword(self.direction.depth(), winner)
            .theta_center
    }

    /// Ranging along `theta_hat`: returns the estimated distance (m).
    pub fn phase2<R: Rng + ?Sized>(
        &self,
        theta_hat: T,
        rx: &RxGroundTruth<T>,
        ideal: bool,
        rng: &mut R,
        trace: &mut SearchTrace<T>,
    ) -> T {
        let winner = self.descend_range(theta_hat, 1, vec![1, 2], rx, ideal, rng, trace);
        self.focus
            .codeword(self.focus.depth(), winner)
            .focal_distance
    }

    /// Full two-phase localization of one receiver.
    pub fn localize<R: Rng + ?Sized>(
        &self,
        rx: &RxGroundTruth<T>,
        mode: SearchMode,
        rng: &mut R,
    ) -> Result<(LocationEstimate<T>, SearchTrace<T>)> {
        if !self.area.contains(rx) {
            return Err(Error::OutsideArea(format!(
                "d={} m, θ={}°",
                rx.distance,
                rx.theta.to_degrees()
            )));
        }
        let mut trace = SearchTrace::default();
        let ideal = mode == SearchMode::Ideal;
        let theta_hat = match mode {
            SearchMode::PerfectPhase1 => rx.theta,
            _ => self.phase1(rx, ideal, rng, &mut trace),
        };
        let d_hat = self.phase2(theta_hat, rx, ideal, rng, &mut trace);
        Ok((LocationEstimate::new(theta_hat, d_hat, rx), trace))
    }
}
