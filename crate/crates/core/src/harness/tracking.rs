//! Tracking campaigns over random straight-line trajectories.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::campaign::iteration_rng;
use super::scenario::Scenario;
use super::stats::ErrorStats;
use crate::error::Result;
use crate::tracker::{TrackRecord, Tracker, Trajectory, HISTORY_WINDOW};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackRun<T> {
    pub trajectory: Trajectory<T>,
    pub records: Vec<TrackRecord<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackingCampaign<T> {
    pub runs: Vec<TrackRun<T>>,
    /// Statistics over tracked epochs only; the bootstrap localizations
    /// at the start of each trajectory are excluded.
    pub stats: ErrorStats<T>,
}

impl<T: Scalar> TrackingCampaign<T> {
    pub fn tracked_records(&self) -> impl Iterator<Item = &TrackRecord<T>> {
        self.runs
            .iter()
            .flat_map(|r| r.records.iter().skip(HISTORY_WINDOW))
    }
}

/// `n_trajectories` random trajectories, each tracked from its first slot.
/// Trajectory `i` draws from the same stream as iteration `i` of a
/// localization campaign.
pub fn run_tracking<T: Scalar>(
    scenario: &Scenario<T>,
    n_trajectories: usize,
    master_seed: u64,
) -> Result<TrackingCampaign<T>> {
    let localizer = scenario.localizer()?;
    let area = scenario.area()?;
    let tracker = Tracker::new(&localizer);
    let runs = (0..n_trajectories as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = iteration_rng(master_seed, i);
            let trajectory = Trajectory::random(&mut rng, &area, &scenario.motion)?;
            let records = tracker.run(&trajectory, &mut rng)?;
            Ok(TrackRun {
                trajectory,
                records,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut errors = Vec::new();
    let mut pilots = Vec::new();
    for r in runs
        .iter()
        .flat_map(|r| r.records.iter().skip(HISTORY_WINDOW))
    {
        errors.push(r.error);
        pilots.push(r.pilots);
    }
    let stats = ErrorStats::new(&errors, &pilots, scenario.resolution())?;
    Ok(TrackingCampaign { runs, stats })
}
