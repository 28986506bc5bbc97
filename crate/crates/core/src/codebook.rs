//! Binary-tree codebooks for direction search (beam-forming) and ranging
//! (beam-focusing).
//!
//! Levels and codeword indices are 1-based throughout, so that the children
//! of codeword `i` are `2i - 1` and `2i` on the next level. Level `l` of every
//! codebook holds exactly `2^l` codewords.
//!
//! Direction codewords tile sine-space `u = sin θ ∈ (-1, 1)` uniformly; the
//! cell of codeword `i` on level `l` is `[-1 + (i-1)/2^(l-1), -1 + i/2^(l-1)]`.
//! Focus codewords tile the range `[0, d_0]` the same way.

use serde::{Deserialize, Serialize};

use crate::beam_model::{invert_focus, Focus, FocusedBeam};
use crate::error::{config, domain, Result};
use crate::units;
use crate::Scalar;

/// Uniform linear array (or illuminated surface patch) driving the beams.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry<T> {
    elements: usize,
    pitch_x: T,
    pitch_y: T,
    carrier_hz: T,
}

impl<T: Scalar> ArrayGeometry<T> {
    pub fn new(elements: usize, pitch_x: T, pitch_y: T, carrier_hz: T) -> Result<Self> {
        if elements < 2 || !elements.is_power_of_two() {
            return Err(config(format!(
                "element count must be a power of two >= 2, got {elements}"
            )));
        }
        if !(pitch_x > T::zero() && pitch_y > T::zero()) {
            return Err(config(format!(
                "element pitch must be positive, got ({pitch_x}, {pitch_y})"
            )));
        }
        if !(carrier_hz > T::zero()) {
            return Err(config(format!(
                "carrier must be positive, got {carrier_hz}"
            )));
        }
        Ok(Self {
            elements,
            pitch_x,
            pitch_y,
            carrier_hz,
        })
    }

    /// Half-wavelength spaced array.
    pub fn half_wavelength(elements: usize, carrier_hz: T) -> Result<Self> {
        let half = units::wavelength(carrier_hz) / T::two();
        Self::new(elements, half, half, carrier_hz)
    }

    pub fn elements(&self) -> usize {
        self.elements
    }

    pub fn pitch_x(&self) -> T {
        self.pitch_x
    }

    pub fn pitch_y(&self) -> T {
        self.pitch_y
    }

    pub fn carrier_hz(&self) -> T {
        self.carrier_hz
    }

    pub fn wavelength(&self) -> T {
        units::wavelength(self.carrier_hz)
    }

    pub fn wavenumber(&self) -> T {
        units::wavenumber(self.wavelength())
    }

    /// Number of binary-tree levels, `log2 N`.
    pub fn levels(&self) -> usize {
        self.elements.trailing_zeros() as usize
    }

    /// Footprint radius of the `2^level`-element sub-aperture.
    pub fn footprint(&self, level: usize) -> T {
        T::of(2f64.powi(level as i32 - 1)) * self.pitch_x
    }
}

/// `(2i - 1, 2i)`: the codewords refining codeword `i` on the next level.
pub fn children(index: usize) -> (usize, usize) {
    debug_assert!(index >= 1);
    (2 * index - 1, 2 * index)
}

/// Pilots needed by `(exhaustive search over the last level, binary-tree search)`.
pub fn pilot_counts(levels: u32) -> (u64, u64) {
    (1u64 << levels, 2 * u64::from(levels))
}

/// Centre of cell `index` when `[lo, hi]` is split into `2^level` equal cells.
fn cell_center<T: Scalar>(lo: T, hi: T, level: usize, index: usize) -> T {
    let cells = T::of(2f64.powi(level as i32));
    lo + (hi - lo) * (T::two() * T::of(index as f64) - T::one()) / (T::two() * cells)
}

/// Index of the cell of `[lo, hi]` containing `v`, clamped to the range.
/// A value on a shared boundary belongs to the lower cell.
fn containing_cell<T: Scalar>(lo: T, hi: T, level: usize, v: T) -> usize {
    let cells = 1usize << level;
    let pos = ((v - lo) / (hi - lo) * T::of(cells as f64)).ceil();
    pos.to_i64().unwrap_or(1).clamp(1, cells as i64) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionKind {
    /// Footprint grows with the level.
    Bfr,
    /// Footprint frozen above `freeze_level`.
    RobustBfr { freeze_level: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionCodeword<T> {
    pub level: usize,
    pub index: usize,
    /// Beam centre in sine-space.
    pub u_center: T,
    /// Steering angle, `asin(u_center)`.
    pub theta_center: T,
    /// Footprint radius `w_x = w_y` (m).
    pub footprint: T,
}

impl<T: Scalar> DirectionCodeword<T> {
    /// Half-width of this codeword's sine-space cell.
    pub fn half_cell(&self) -> T {
        T::of(2f64.powi(-(self.level as i32)))
    }

    /// Collimated beam for this codeword.
    pub fn beam(&self, tx_power: T, wavenumber: T) -> Result<FocusedBeam<T>> {
        FocusedBeam::new(
            tx_power,
            self.footprint,
            self.footprint,
            self.theta_center,
            Focus::Infinite,
            wavenumber,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionCodebook<T> {
    kind: DirectionKind,
    geometry: ArrayGeometry<T>,
    levels: Vec<Vec<DirectionCodeword<T>>>,
}

impl<T: Scalar> DirectionCodebook<T> {
    /// Beam-forming codebook with one level per doubling of the sub-aperture.
    pub fn bfr(geometry: ArrayGeometry<T>, levels: usize) -> Result<Self> {
        if levels != geometry.levels() {
            return Err(config(format!(
                "beam-forming codebook needs log2(N) = {} levels, got {levels}",
                geometry.levels()
            )));
        }
        let levels = (1..=levels)
            .map(|l| Self::level_codewords(l, geometry.footprint(l)))
            .collect();
        Ok(Self {
            kind: DirectionKind::Bfr,
            geometry,
            levels,
        })
    }

    /// Same directions as `bfr`, with the footprint of `freeze_level` reused
    /// on every level above it.
    pub fn robust(bfr: &Self, freeze_level: usize) -> Result<Self> {
        if freeze_level == 0 || freeze_level > bfr.depth() {
            return Err(config(format!(
                "freeze level must be in 1..={}, got {freeze_level}",
                bfr.depth()
            )));
        }
        let frozen = bfr.geometry.footprint(freeze_level);
        let levels = bfr
            .levels
            .iter()
            .map(|level| {
                level
                    .iter()
                    .map(|cw| DirectionCodeword {
                        footprint: if cw.level > freeze_level {
                            frozen
                        } else {
                            cw.footprint
                        },
                        ..*cw
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            kind: DirectionKind::RobustBfr { freeze_level },
            geometry: bfr.geometry,
            levels,
        })
    }

    fn level_codewords(level: usize, footprint: T) -> Vec<DirectionCodeword<T>> {
        (1..=1usize << level)
            .map(|index| {
                let u_center = cell_center(-T::one(), T::one(), level, index);
                DirectionCodeword {
                    level,
                    index,
                    u_center,
                    theta_center: u_center.asin(),
                    footprint,
                }
            })
            .collect()
    }

    pub fn kind(&self) -> DirectionKind {
        self.kind
    }

    pub fn geometry(&self) -> &ArrayGeometry<T> {
        &self.geometry
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Codewords of `level` (1-based).
    pub fn level(&self, level: usize) -> &[DirectionCodeword<T>] {
        &self.levels[level - 1]
    }

    pub fn codeword(&self, level: usize, index: usize) -> &DirectionCodeword<T> {
        &self.levels[level - 1][index - 1]
    }

    pub fn levels(&self) -> impl Iterator<Item = &[DirectionCodeword<T>]> {
        self.levels.iter().map(Vec::as_slice)
    }

    /// Index of the codeword on `level` whose cell contains `u` (ties go to
    /// the lower index).
    pub fn containing(&self, level: usize, u: T) -> usize {
        containing_cell(-T::one(), T::one(), level, u)
    }

    /// Indices on `level` whose cells overlap `[-sin θ_max, sin θ_max]` with
    /// positive length.
    pub fn entry_codewords(&self, level: usize, theta_max: T) -> Result<Vec<usize>> {
        if level == 0 || level > self.depth() {
            return Err(config(format!(
                "entry level must be in 1..={}, got {level}",
                self.depth()
            )));
        }
        if !(theta_max > T::zero()) {
            return Err(domain(format!(
                "maximum angle must be positive, got {theta_max}"
            )));
        }
        let s = theta_max.min(T::FRAC_PI_2()).sin();
        Ok(self
            .level(level)
            .iter()
            .filter(|cw| {
                let h = cw.half_cell();
                cw.u_center - h < s && cw.u_center + h > -s
            })
            .map(|cw| cw.index)
            .collect())
    }

    /// The `count` codewords of `level` whose centres are nearest to `u`,
    /// returned in index order.
    pub fn nearest(&self, level: usize, u: T, count: usize) -> Vec<usize> {
        nearest_indices(self.level(level).iter().map(|cw| cw.u_center), u, count)
    }
}

/// Indices (1-based) of the `count` values closest to `target`, sorted
/// ascending. Ties prefer the lower index.
fn nearest_indices<T: Scalar>(
    values: impl Iterator<Item = T>,
    target: T,
    count: usize,
) -> Vec<usize> {
    let mut scored: Vec<(T, usize)> = values
        .enumerate()
        .map(|(i, v)| ((v - target).abs(), i + 1))
        .collect();
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let mut picked: Vec<usize> = scored.into_iter().take(count).map(|(_, i)| i).collect();
    picked.sort_unstable();
    picked
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FocusCodeword<T> {
    pub level: usize,
    pub index: usize,
    pub focal_distance: T,
    pub major_radius: T,
    pub intended_focus: T,
    /// Footprint radius `w_x = w_y` (m).
    pub footprint: T,
}

impl<T: Scalar> FocusCodeword<T> {
    /// Focused beam for this codeword steered along `steering`.
    pub fn beam(&self, tx_power: T, steering: T, wavenumber: T) -> Result<FocusedBeam<T>> {
        FocusedBeam::new(
            tx_power,
            self.footprint,
            self.footprint,
            steering,
            Focus::Finite(self.intended_focus),
            wavenumber,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FocusCodebook<T> {
    max_distance: T,
    alpha: T,
    wavenumber: T,
    levels: Vec<Vec<FocusCodeword<T>>>,
}

impl<T: Scalar> FocusCodebook<T> {
    /// Beam-focusing codebook that splits `[0, d_0]` into `2^l` focal cells on
    /// level `l`, with major radius `α d_0 / 2^(l-1)`.
    pub fn new(max_distance: T, alpha: T, levels: usize, wavenumber: T) -> Result<Self> {
        if !(max_distance > T::zero() && max_distance.is_finite()) {
            return Err(domain(format!(
                "maximum distance must be positive, got {max_distance}"
            )));
        }
        if !(alpha > T::zero()) {
            return Err(domain(format!(
                "overlap coefficient must be positive, got {alpha}"
            )));
        }
        if levels == 0 {
            return Err(config("focus codebook needs at least one level"));
        }
        if alpha < T::of(0.25) || alpha > T::half() {
            log::warn!("overlap coefficient {alpha} outside [0.25, 0.5]");
        }
        let first = max_distance / T::of(4.0);
        let mut out = Vec::with_capacity(levels);
        for level in 1..=levels {
            let scale = T::of(2f64.powi(level as i32 - 1));
            let major_radius = alpha * max_distance / scale;
            let codewords = (1..=1usize << level)
                .map(|index| {
                    let odd = T::of((2 * index - 1) as f64);
                    let focal_distance = first / scale * odd;
                    let (intended_focus, footprint) =
                        invert_focus(focal_distance, major_radius, wavenumber)?;
                    Ok(FocusCodeword {
                        level,
                        index,
                        focal_distance,
                        major_radius,
                        intended_focus,
                        footprint,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            out.push(codewords);
        }
        Ok(Self {
            max_distance,
            alpha,
            wavenumber,
            levels: out,
        })
    }

    pub fn max_distance(&self) -> T {
        self.max_distance
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn wavenumber(&self) -> T {
        self.wavenumber
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, level: usize) -> &[FocusCodeword<T>] {
        &self.levels[level - 1]
    }

    pub fn codeword(&self, level: usize, index: usize) -> &FocusCodeword<T> {
        &self.levels[level - 1][index - 1]
    }

    pub fn levels(&self) -> impl Iterator<Item = &[FocusCodeword<T>]> {
        self.levels.iter().map(Vec::as_slice)
    }

    /// Major radius of the deepest level: the ranging resolution.
    pub fn resolution(&self) -> T {
        self.levels[self.depth() - 1][0].major_radius
    }

    /// Index of the codeword on `level` whose focal distance is nearest `d`
    /// (ties go to the lower index).
    pub fn nearest_one(&self, level: usize, d: T) -> usize {
        self.nearest(level, d, 1)[0]
    }

    /// The `count` codewords of `level` with focal distance nearest `d`,
    /// returned in index order.
    pub fn nearest(&self, level: usize, d: T, count: usize) -> Vec<usize> {
        nearest_indices(
            self.level(level).iter().map(|cw| cw.focal_distance),
            d,
            count,
        )
    }
}
