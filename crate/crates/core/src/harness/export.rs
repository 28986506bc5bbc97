//! Plot-ready CSV tables and JSON run summaries.
//!
//! All lengths are metres and every column name carries its unit. The
//! headers are part of the public interface; `tests/golden` pins them.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::campaign::{Campaign, LevelPoint, SweepPoint};
use super::scenario::Scenario;
use super::stats::ErrorStats;
use super::tracking::TrackRun;
use crate::error::Result;
use crate::localizer::SearchMode;
use crate::Scalar;

pub const CDF_HEADER: &[&str] = &["error_m", "cdf"];
pub const SAMPLE_HEADER: &[&str] = &[
    "iteration",
    "true_theta_deg",
    "true_distance_m",
    "est_theta_deg",
    "est_distance_m",
    "error_m",
    "pilots",
];
pub const SWEEP_HEADER: &[&str] = &[
    "noise_dbm",
    "success_probability",
    "mean_error_m",
    "p999_error_m",
    "mean_pilots",
];
pub const LEVEL_HEADER: &[&str] = &[
    "focus_levels",
    "resolution_m",
    "success_probability",
    "mean_error_m",
    "p999_error_m",
    "mean_pilots",
];
pub const TRACK_HEADER: &[&str] = &[
    "trajectory",
    "slot",
    "true_x_m",
    "true_z_m",
    "est_x_m",
    "est_z_m",
    "error_m",
    "pilots",
];

fn writer<W: Write>(out: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    Ok(w)
}

fn f<T: Scalar>(v: T) -> String {
    v.as_f64().to_string()
}

/// One row per distinct error value.
pub fn write_cdf<T: Scalar, W: Write>(out: W, stats: &ErrorStats<T>) -> Result<()> {
    let mut w = writer(out, CDF_HEADER)?;
    for &(e, p) in &stats.cdf {
        w.write_record([f(e), f(p)])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per Monte-Carlo iteration.
pub fn write_samples<T: Scalar, W: Write>(out: W, campaign: &Campaign<T>) -> Result<()> {
    let mut w = writer(out, SAMPLE_HEADER)?;
    for (i, s) in campaign.samples.iter().enumerate() {
        w.write_record([
            i.to_string(),
            f(s.rx.theta.to_degrees()),
            f(s.rx.distance),
            f(s.estimate.theta.to_degrees()),
            f(s.estimate.distance),
            f(s.estimate.error),
            s.pilots.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep<T: Scalar, W: Write>(out: W, points: &[SweepPoint<T>]) -> Result<()> {
    let mut w = writer(out, SWEEP_HEADER)?;
    for p in points {
        w.write_record([
            f(p.noise_dbm),
            f(p.success_probability),
            f(p.mean_error),
            f(p.p999),
            f(p.mean_pilots),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_levels<T: Scalar, W: Write>(out: W, points: &[LevelPoint<T>]) -> Result<()> {
    let mut w = writer(out, LEVEL_HEADER)?;
    for p in points {
        let s = &p.stats;
        w.write_record([
            p.focus_levels.to_string(),
            f(s.resolution),
            f(s.success_probability),
            f(s.mean),
            f(s.p999),
            f(s.mean_pilots),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per epoch of every trajectory.
pub fn write_track<T: Scalar, W: Write>(out: W, runs: &[TrackRun<T>]) -> Result<()> {
    let mut w = writer(out, TRACK_HEADER)?;
    for (i, run) in runs.iter().enumerate() {
        for r in &run.records {
            w.write_record([
                i.to_string(),
                r.slot.to_string(),
                f(r.true_x),
                f(r.true_z),
                f(r.est_x),
                f(r.est_z),
                f(r.error),
                r.pilots.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Everything needed to rerun an experiment bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance<T> {
    pub version: String,
    pub seed: u64,
    pub config: Scenario<T>,
}

impl<T: Scalar> Provenance<T> {
    pub fn new(config: &Scenario<T>, seed: u64) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config: config.clone(),
        }
    }
}

/// Headline numbers of a campaign; lengths in metres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary<T> {
    pub scenario: String,
    pub mode: SearchMode,
    pub n: usize,
    pub seed: u64,
    pub mean: T,
    pub max: T,
    pub p999: T,
    pub success: T,
    pub mean_pilots: T,
    pub provenance: Provenance<T>,
}

impl<T: Scalar> Summary<T> {
    /// `n` is the number of runs requested (iterations or trajectories),
    /// which for tracking differs from the number of error samples.
    pub fn new(scenario: &Scenario<T>, n: usize, seed: u64, stats: &ErrorStats<T>) -> Self {
        Self {
            scenario: scenario.name.clone(),
            mode: scenario.mode,
            n,
            seed,
            mean: stats.mean,
            max: stats.max,
            p999: stats.p999,
            success: stats.success_probability,
            mean_pilots: stats.mean_pilots,
            provenance: Provenance::new(scenario, seed),
        }
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        out.write_all(b"\n")?;
        Ok(())
    }
}
