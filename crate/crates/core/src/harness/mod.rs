//! Scenario configuration and Monte-Carlo experiments.

mod campaign;
pub mod export;
mod scenario;
pub mod stats;
mod tracking;

pub use campaign::{
    iteration_rng, iteration_seed, level_sweep, noise_sweep, run_campaign, sample_rx, Campaign,
    LevelPoint, Sample, SweepPoint,
};
pub use scenario::{CodebookChoice, MotionModel, Scenario};
pub use stats::{empirical_cdf, ks_two_sample, ErrorStats, KsResult};
pub use tracking::{run_tracking, TrackRun, TrackingCampaign};
