//! Error statistics: empirical CDF, nearest-rank percentiles, success rate
//! and the two-sample Kolmogorov–Smirnov test.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localizer::is_success;
use crate::Scalar;

/// Percentiles reported in every [`ErrorStats`].
pub const REPORTED_PERCENTILES: [f64; 6] = [0.5, 0.9, 0.95, 0.99, 0.999, 1.0];

/// Empirical CDF of `errors` as `(value, fraction ≤ value)` pairs, one per
/// distinct value, sorted ascending.
pub fn empirical_cdf<T: Scalar>(errors: &[T]) -> Result<Vec<(T, T)>> {
    if errors.is_empty() {
        return Err(Error::EmptySample);
    }
    let sorted = sorted(errors);
    let n = T::of(sorted.len() as f64);
    let mut out: Vec<(T, T)> = Vec::new();
    for (i, &e) in sorted.iter().enumerate() {
        let frac = T::of((i + 1) as f64) / n;
        match out.last_mut() {
            Some(last) if last.0 == e => last.1 = frac,
            _ => out.push((e, frac)),
        }
    }
    Ok(out)
}

fn sorted<T: Scalar>(values: &[T]) -> Vec<T> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("errors are never NaN"));
    v
}

/// Nearest-rank percentile of an ascending sample, `q ∈ (0, 1]`.
pub fn percentile_sorted<T: Scalar>(sorted: &[T], q: f64) -> T {
    let n = sorted.len();
    let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
    sorted[rank - 1]
}

pub fn percentile<T: Scalar>(values: &[T], q: f64) -> Result<T> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(percentile_sorted(&sorted(values), q))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats<T> {
    pub n_samples: usize,
    pub mean: T,
    pub max: T,
    /// Error not exceeded by 99.9% of samples.
    pub p999: T,
    /// `(q, value)` for [`REPORTED_PERCENTILES`].
    pub percentiles: Vec<(f64, T)>,
    pub cdf: Vec<(T, T)>,
    /// Fraction of samples with error at most `resolution`.
    pub success_probability: T,
    pub resolution: T,
    pub mean_pilots: T,
}

impl<T: Scalar> ErrorStats<T> {
    pub fn new(errors: &[T], pilots: &[usize], resolution: T) -> Result<Self> {
        if errors.is_empty() {
            return Err(Error::EmptySample);
        }
        let n = errors.len();
        let nf = T::of(n as f64);
        let sorted = sorted(errors);
        let mean = sorted.iter().fold(T::zero(), |acc, &e| acc + e) / nf;
        let successes = errors
            .iter()
            .filter(|&&e| is_success(e, resolution))
            .count();
        let mean_pilots = if pilots.is_empty() {
            T::zero()
        } else {
            T::of(pilots.iter().sum::<usize>() as f64 / pilots.len() as f64)
        };
        Ok(Self {
            n_samples: n,
            mean,
            max: sorted[n - 1],
            p999: percentile_sorted(&sorted, 0.999),
            percentiles: REPORTED_PERCENTILES
                .iter()
                .map(|&q| (q, percentile_sorted(&sorted, q)))
                .collect(),
            cdf: empirical_cdf(&sorted)?,
            success_probability: T::of(successes as f64) / nf,
            resolution,
            mean_pilots,
        })
    }

    /// Empirical CDF evaluated at `x`.
    pub fn cdf_at(&self, x: T) -> T {
        match self.cdf.partition_point(|&(e, _)| e <= x) {
            0 => T::zero(),
            i => self.cdf[i - 1].1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    /// Largest vertical distance between the two empirical CDFs.
    pub statistic: f64,
    /// Asymptotic p-value of the null hypothesis "same distribution".
    pub p_value: f64,
}

/// Kolmogorov distribution survival function `Q(λ)`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov–Smirnov test.
pub fn ks_two_sample<T: Scalar>(a: &[T], b: &[T]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let a: Vec<f64> = sorted(a).into_iter().map(T::as_f64).collect();
    let b: Vec<f64> = sorted(b).into_iter().map(T::as_f64).collect();
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = (na * nb / (na + nb)).sqrt();
    let lambda = (ne + 0.12 + 0.11 / ne) * d;
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_q(lambda),
    })
}
