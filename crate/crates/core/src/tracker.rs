//! Tracking of a receiver moving along a straight line.
//!
//! After three full localizations the tracker extrapolates the next position
//! from the last three estimates and probes only around it: four direction
//! codewords three levels above the last, a binary descent to the last
//! level, then four focal cells on the last focus level.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::beam_model::PlanePoint;
use crate::error::{config, Result};
use crate::harness::MotionModel;
use crate::localizer::{
    AreaOfInterest, Localizer, LocationEstimate, RxGroundTruth, SearchMode, SearchTrace,
};
use crate::Scalar;

/// Estimates kept for prediction.
pub const HISTORY_WINDOW: usize = 3;

/// Codewords probed per phase while tracking.
pub const TRACK_WINDOW: usize = 4;

/// Levels above the last direction level at which tracking starts.
pub const TRACK_LEVEL_OFFSET: usize = 3;

/// Linear extrapolation from the last three estimates (oldest first):
/// `p[t] + (p[t] - p[t-2]) / 2`. `None` with fewer than three.
pub fn predict_next<T: Scalar>(history: &[PlanePoint<T>]) -> Option<PlanePoint<T>> {
    let n = history.len();
    if n < HISTORY_WINDOW {
        return None;
    }
    let (last, first) = (history[n - 1], history[n - 3]);
    Some(PlanePoint::new(
        last.x + (last.x - first.x) / T::two(),
        last.z + (last.z - first.z) / T::two(),
    ))
}

/// Pull a predicted point back into the area of interest.
pub fn clamp_to_area<T: Scalar>(p: PlanePoint<T>, area: &AreaOfInterest<T>) -> PlanePoint<T> {
    area.clamp(p)
}

/// Straight-line constant-speed motion sampled once per timeslot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<T> {
    pub start: PlanePoint<T>,
    /// Unit direction of motion.
    pub direction: PlanePoint<T>,
    /// Metres per timeslot.
    pub speed: T,
    pub slots: usize,
}

impl<T: Scalar> Trajectory<T> {
    pub fn new(start: PlanePoint<T>, heading: T, speed: T, slots: usize) -> Result<Self> {
        if !(speed >= T::zero()) {
            return Err(config(format!("speed must be non-negative, got {speed}")));
        }
        Ok(Self {
            start,
            direction: PlanePoint::new(heading.sin(), heading.cos()),
            speed,
            slots,
        })
    }

    pub fn position(&self, slot: usize) -> PlanePoint<T> {
        let t = T::of(slot as f64) * self.speed;
        PlanePoint::new(
            self.start.x + t * self.direction.x,
            self.start.z + t * self.direction.z,
        )
    }

    pub fn positions(&self) -> impl Iterator<Item = PlanePoint<T>> + '_ {
        (0..self.slots).map(|s| self.position(s))
    }

    pub fn path_length(&self) -> T {
        T::of(self.slots.saturating_sub(1) as f64) * self.speed
    }

    /// Random line inside `area`: start uniform in angle and distance,
    /// heading uniform, followed until it leaves the area. Lines shorter
    /// than `motion.min_path_length` are redrawn.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        area: &AreaOfInterest<T>,
        motion: &MotionModel<T>,
    ) -> Result<Self> {
        const MAX_ATTEMPTS: usize = 100_000;
        for _ in 0..MAX_ATTEMPTS {
            let rx = crate::harness::sample_rx(rng, area);
            let start = rx.cartesian();
            let heading = T::of(rng.random_range(0.0..std::f64::consts::TAU));
            let dir = PlanePoint::new(heading.sin(), heading.cos());
            let length = exit_distance(start, dir, area);
            if length < motion.min_path_length {
                continue;
            }
            let (lo, hi) = (motion.min_speed.as_f64(), motion.max_speed.as_f64());
            let speed = T::of(if hi > lo {
                rng.random_range(lo..hi)
            } else {
                lo
            });
            if speed <= T::zero() {
                return Err(config("random trajectories need a positive speed"));
            }
            let slots = (length / speed).ceil().to_usize().unwrap_or(1).max(1);
            return Self::new(start, heading, speed, slots);
        }
        Err(config(format!(
            "no straight path of at least {} m fits the area",
            motion.min_path_length
        )))
    }
}

/// Distance along `dir` from `p` to the boundary of `area`.
fn exit_distance<T: Scalar>(p: PlanePoint<T>, dir: PlanePoint<T>, area: &AreaOfInterest<T>) -> T {
    let b = p.x * dir.x + p.z * dir.z;
    let r2 = p.x * p.x + p.z * p.z;

    // outer arc
    let outer = area.max_distance * area.max_distance;
    let mut t = -b + (b * b - (r2 - outer)).max(T::zero()).sqrt();

    // the two edges of the wedge: n · q <= 0
    let (s, c) = area.max_angle.sin_cos();
    for n in [PlanePoint::new(c, -s), PlanePoint::new(-c, -s)] {
        let along = n.x * dir.x + n.z * dir.z;
        if along > T::zero() {
            let offset = n.x * p.x + n.z * p.z;
            t = t.min((-offset / along).max(T::zero()));
        }
    }

    // inner arc, only if the line enters it ahead of p
    let inner = area.min_distance * area.min_distance;
    let disc = b * b - (r2 - inner);
    if disc > T::zero() {
        let enter = -b - disc.sqrt();
        if enter > T::zero() {
            t = t.min(enter);
        }
    }
    t
}

/// Estimate history and per-epoch error series of one tracked receiver.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrackState<T> {
    history: VecDeque<PlanePoint<T>>,
    prediction: Option<PlanePoint<T>>,
    pub errors: Vec<T>,
}

impl<T: Scalar> TrackState<T> {
    pub fn new() -> Self {
        Self {
            history: VecDeque::with_capacity(HISTORY_WINDOW),
            prediction: None,
            errors: Vec::new(),
        }
    }

    pub fn history(&self) -> impl Iterator<Item = &PlanePoint<T>> {
        self.history.iter()
    }

    /// Prediction for the next slot, available once three estimates exist.
    pub fn prediction(&self) -> Option<PlanePoint<T>> {
        self.prediction
    }

    pub fn push(&mut self, estimate: &LocationEstimate<T>) {
        if self.history.len() == HISTORY_WINDOW {
            self.history.pop_front();
        }
        self.history.push_back(estimate.position);
        self.errors.push(estimate.error);
        let h: Vec<PlanePoint<T>> = self.history.iter().copied().collect();
        self.prediction = predict_next(&h);
    }
}

/// One epoch of a tracking run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackRecord<T> {
    pub slot: usize,
    pub true_x: T,
    pub true_z: T,
    pub est_x: T,
    pub est_z: T,
    pub error: T,
    pub pilots: usize,
}

/// Reduced-overhead localization around a predicted position.
#[derive(Debug, Clone, Copy)]
pub struct Tracker<'a, T> {
    localizer: &'a Localizer<T>,
}

impl<'a, T: Scalar> Tracker<'a, T> {
    pub fn new(localizer: &'a Localizer<T>) -> Self {
        Self { localizer }
    }

    /// Direction level where tracking starts.
    pub fn start_level(&self) -> usize {
        let depth = self.localizer.direction_codebook().depth();
        depth.saturating_sub(TRACK_LEVEL_OFFSET).max(1)
    }

    /// Codewords probed first in each phase for a predicted position:
    /// `(direction candidates at start_level, focus candidates at the last level)`.
    pub fn windows(&self, predicted: PlanePoint<T>) -> (Vec<usize>, Vec<usize>) {
        let p = clamp_to_area(predicted, self.localizer.area());
        let dir = self.localizer.direction_codebook();
        let focus = self.localizer.focus_codebook();
        (
            dir.nearest(self.start_level(), p.angle().sin(), TRACK_WINDOW),
            focus.nearest(focus.depth(), p.distance(), TRACK_WINDOW),
        )
    }

    /// One tracking epoch. Falls back to full localization while the state
    /// has no prediction yet.
    pub fn step<R: Rng + ?Sized>(
        &self,
        state: &mut TrackState<T>,
        rx: &RxGroundTruth<T>,
        rng: &mut R,
    ) -> Result<(LocationEstimate<T>, SearchTrace<T>)> {
        let (estimate, trace) = match state.prediction() {
            None => self.localizer.localize(rx, SearchMode::Measured, rng)?,
            Some(predicted) => {
                let (dir_window, focus_window) = self.windows(predicted);
                let mut trace = SearchTrace::default();
                let winner = self.localizer.descend_direction(
                    self.start_level(),
                    dir_window,
                    rx,
                    false,
                    rng,
                    &mut trace,
                );
                let dir = self.localizer.direction_codebook();
                let theta = dir.codeword(dir.depth(), winner).theta_center;
                let focus = self.localizer.focus_codebook();
                let last = focus.depth();
                let cell = self.localizer.descend_range(
                    theta,
                    last,
                    focus_window,
                    rx,
                    false,
                    rng,
                    &mut trace,
                );
                let distance = focus.codeword(last, cell).focal_distance;
                (LocationEstimate::new(theta, distance, rx), trace)
            }
        };
        state.push(&estimate);
        Ok((estimate, trace))
    }

    /// Track a receiver along `trajectory`, stopping early if it leaves the
    /// area of interest.
    pub fn run<R: Rng + ?Sized>(
        &self,
        trajectory: &Trajectory<T>,
        rng: &mut R,
    ) -> Result<Vec<TrackRecord<T>>> {
        let mut state = TrackState::new();
        let mut out = Vec::with_capacity(trajectory.slots);
        for (slot, p) in trajectory.positions().enumerate() {
            let rx = match RxGroundTruth::from_point(p) {
                Ok(rx) if self.localizer.area().contains(&rx) => rx,
                _ => break,
            };
            let (est, trace) = self.step(&mut state, &rx, rng)?;
            out.push(TrackRecord {
                slot,
                true_x: p.x,
                true_z: p.z,
                est_x: est.position.x,
                est_z: est.position.z,
                error: est.error,
                pilots: trace.pilots(),
            });
        }
        Ok(out)
    }
}
