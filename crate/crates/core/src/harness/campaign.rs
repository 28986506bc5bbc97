//! Monte-Carlo campaigns over random receiver positions.
//!
//! Every iteration draws from its own ChaCha stream seeded from
//! `(master_seed, iteration)`, so results do not depend on how iterations are
//! scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scenario::Scenario;
use super::stats::ErrorStats;
use crate::error::Result;
use crate::localizer::{AreaOfInterest, LocationEstimate, RxGroundTruth};
use crate::Scalar;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of iteration `index` of a campaign.
pub fn iteration_seed(master_seed: u64, index: u64) -> u64 {
    mix(mix(master_seed) ^ index)
}

pub fn iteration_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(iteration_seed(master_seed, index))
}

/// Receiver uniform in angle and (independently) in distance. Not uniform
/// in area.
pub fn sample_rx<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    area: &AreaOfInterest<T>,
) -> RxGroundTruth<T> {
    let theta_max = area.max_angle.as_f64();
    let theta = rng.random_range(-theta_max..=theta_max);
    let d = rng.random_range(area.min_distance.as_f64()..=area.max_distance.as_f64());
    let rx = RxGroundTruth {
        theta: T::of(theta),
        distance: T::of(d),
    };
    // rounding to f32 may nudge a sample just outside the area
    RxGroundTruth::from_point(area.clamp(rx.cartesian())).unwrap_or(rx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample<T> {
    pub rx: RxGroundTruth<T>,
    pub estimate: LocationEstimate<T>,
    pub pilots: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Campaign<T> {
    pub samples: Vec<Sample<T>>,
    pub stats: ErrorStats<T>,
}

impl<T: Scalar> Campaign<T> {
    pub fn errors(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.estimate.error).collect()
    }
}

/// `n_iter` independent localizations at random receiver positions.
pub fn run_campaign<T: Scalar>(
    scenario: &Scenario<T>,
    n_iter: usize,
    master_seed: u64,
) -> Result<Campaign<T>> {
    let localizer = scenario.localizer()?;
    let area = scenario.area()?;
    let mode = scenario.mode;
    let samples = (0..n_iter as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = iteration_rng(master_seed, i);
            let rx = sample_rx(&mut rng, &area);
            let (estimate, trace) = localizer.localize(&rx, mode, &mut rng)?;
            Ok(Sample {
                rx,
                estimate,
                pilots: trace.pilots(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let errors: Vec<T> = samples.iter().map(|s| s.estimate.error).collect();
    let pilots: Vec<usize> = samples.iter().map(|s| s.pilots).collect();
    let stats = ErrorStats::new(&errors, &pilots, scenario.resolution())?;
    Ok(Campaign { samples, stats })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint<T> {
    pub noise_dbm: T,
    pub success_probability: T,
    pub mean_error: T,
    pub p999: T,
    pub mean_pilots: T,
}

/// One campaign per noise level; all points share `master_seed`, so receiver
/// positions are common across the sweep.
pub fn noise_sweep<T: Scalar>(
    scenario: &Scenario<T>,
    noise_dbm: &[T],
    n_iter: usize,
    master_seed: u64,
) -> Result<Vec<SweepPoint<T>>> {
    noise_dbm
        .iter()
        .map(|&dbm| {
            let s = scenario.clone().with_noise_dbm(dbm);
            let c = run_campaign(&s, n_iter, master_seed)?;
            Ok(SweepPoint {
                noise_dbm: dbm,
                success_probability: c.stats.success_probability,
                mean_error: c.stats.mean,
                p999: c.stats.p999,
                mean_pilots: c.stats.mean_pilots,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelPoint<T> {
    pub focus_levels: usize,
    pub stats: ErrorStats<T>,
}

/// One campaign per depth of the focus codebook.
pub fn level_sweep<T: Scalar>(
    scenario: &Scenario<T>,
    focus_levels: &[usize],
    n_iter: usize,
    master_seed: u64,
) -> Result<Vec<LevelPoint<T>>> {
    focus_levels
        .iter()
        .map(|&levels| {
            let s = scenario.clone().with_focus_levels(levels);
            Ok(LevelPoint {
                focus_levels: levels,
                stats: run_campaign(&s, n_iter, master_seed)?.stats,
            })
        })
        .collect()
}
