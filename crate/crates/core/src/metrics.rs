//! Calibration and accuracy metrics for interval predictors: empirical
//! coverage, mean width, RMSE, and the integrated absolute error (IAE) of a
//! coverage curve against the diagonal.

use crate::conformal::PredictionInterval;
use crate::error::{Error, Result};

/// Metrics of one method at one nominal level over a test set.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    /// Fraction of targets inside their interval (closed membership).
    pub coverage: f64,
    /// Mean interval width (infinite if any interval is unbounded).
    pub mean_width: f64,
    /// Integrated absolute error of the coverage curve.
    pub iae: f64,
    /// Root-mean-square error of the point predictions.
    pub rmse: f64,
    /// Nominal level the intervals were built at.
    pub level: f64,
    /// Method tag (e.g. `fcp_gp`, `jplus_gp`).
    pub method: String,
    /// Seed of the repetition the record belongs to.
    pub seed: u64,
}

/// Fraction of `targets` covered by the paired intervals (closed bounds).
pub fn empirical_coverage(intervals: &[PredictionInterval], targets: &[f64]) -> Result<f64> {
    if intervals.is_empty() {
        return Err(Error::EmptyInput("intervals"));
    }
    if intervals.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: intervals.len(),
            actual: targets.len(),
        });
    }
    let hits = intervals
        .iter()
        .zip(targets)
        .filter(|(iv, &z)| iv.contains(z))
        .count();
    Ok(hits as f64 / intervals.len() as f64)
}

/// Mean width of the intervals.
pub fn mean_width(intervals: &[PredictionInterval]) -> Result<f64> {
    if intervals.is_empty() {
        return Err(Error::EmptyInput("intervals"));
    }
    Ok(intervals.iter().map(PredictionInterval::width).sum::<f64>() / intervals.len() as f64)
}

/// Root-mean-square error of point predictions against targets.
pub fn rmse(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    if predictions.is_empty() {
        return Err(Error::EmptyInput("predictions"));
    }
    if predictions.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: predictions.len(),
            actual: targets.len(),
        });
    }
    let mse = predictions
        .iter()
        .zip(targets)
        .map(|(p, t)| (p - t) * (p - t))
        .sum::<f64>()
        / predictions.len() as f64;
    Ok(mse.sqrt())
}

/// Evenly spaced interior level grid `j/(m+1)`, `j = 1..=m`.
pub fn default_alpha_grid(m: usize) -> Vec<f64> {
    let denom = m as f64 + 1.0;
    (1..=m).map(|j| j as f64 / denom).collect()
}

/// Integrated absolute error `∫₀¹ |coverage(α) − α| dα` by the trapezoidal
/// rule on the given grid, extended with the exact endpoints `(0, 0)` and
/// `(1, 1)`.
///
/// `levels` must be strictly increasing inside (0,1); `coverages` are the
/// matching empirical coverages in [0,1].
#[allow(clippy::neg_cmp_op_on_partial_ord)] // !(a < b) also rejects NaN entries
pub fn iae(levels: &[f64], coverages: &[f64]) -> Result<f64> {
    if levels.is_empty() {
        return Err(Error::EmptyInput("levels"));
    }
    if levels.len() < 2 {
        return Err(Error::invalid("levels", "need at least two grid points"));
    }
    if levels.len() != coverages.len() {
        return Err(Error::DimensionMismatch {
            expected: levels.len(),
            actual: coverages.len(),
        });
    }
    for pair in levels.windows(2) {
        if !(pair[0] < pair[1]) {
            return Err(Error::UnsortedGrid);
        }
    }
    if levels[0] <= 0.0 || levels[levels.len() - 1] >= 1.0 {
        return Err(Error::invalid("levels", "grid must lie strictly in (0,1)"));
    }
    for &c in coverages {
        if !(0.0..=1.0).contains(&c) || c.is_nan() {
            return Err(Error::invalid("coverages", "entries must lie in [0,1]"));
        }
    }

    let mut alpha_prev = 0.0;
    let mut gap_prev = 0.0; // |coverage − level| at the left node
    let mut total = 0.0;
    for (&alpha, &cov) in levels.iter().zip(coverages) {
        let gap = (cov - alpha).abs();
        total += 0.5 * (gap_prev + gap) * (alpha - alpha_prev);
        alpha_prev = alpha;
        gap_prev = gap;
    }
    total += 0.5 * gap_prev * (1.0 - alpha_prev);
    Ok(total)
}
