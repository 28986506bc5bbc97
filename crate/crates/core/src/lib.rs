//! Near-field localization with focused beams from a large intelligent
//! surface: beam model, hierarchical codebooks, the two-phase search, a
//! tracker for moving receivers and a Monte-Carlo harness.
//!
//! Everything is generic over the float type; the `*F64` aliases below are
//! the usual entry points.

// `!(x > 0)` is used throughout to reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beam_model;
pub mod codebook;
pub mod error;
pub mod harness;
pub mod localizer;
mod scalar;
pub mod tracker;
pub mod units;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type FocusedBeamF64 = beam_model::FocusedBeam<f64>;
pub type ArrayGeometryF64 = codebook::ArrayGeometry<f64>;
pub type DirectionCodebookF64 = codebook::DirectionCodebook<f64>;
pub type FocusCodebookF64 = codebook::FocusCodebook<f64>;
pub type LocalizerF64 = localizer::Localizer<f64>;
pub type RxGroundTruthF64 = localizer::RxGroundTruth<f64>;
pub type ScenarioF64 = harness::Scenario<f64>;
pub type ErrorStatsF64 = harness::ErrorStats<f64>;
pub type TrajectoryF64 = tracker::Trajectory<f64>;
