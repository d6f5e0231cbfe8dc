//! Prediction-interval quality measures (PICP, PINAW, CWC), point-prediction
//! metrics, and interval padding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Interval quality summary for one evaluation split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalReport {
    /// Fraction of targets inside their closed interval.
    pub picp: f64,
    /// Mean interval width normalized by the observed target range.
    pub pinaw: f64,
    /// Coverage-width criterion combining the two.
    pub cwc: f64,
    /// Nominal coverage level the CWC penalizes against.
    pub nominal_coverage: f64,
    /// CWC penalty steepness.
    pub eta: f64,
}

fn check_bounds(lower: &[f64], upper: &[f64]) -> Result<()> {
    if lower.len() != upper.len() {
        return Err(Error::Dataset(format!(
            "bound length mismatch: {} lower vs {} upper",
            lower.len(),
            upper.len()
        )));
    }
    if lower.is_empty() {
        return Err(Error::Dataset("empty interval sequence".into()));
    }
    for (i, (&lo, &hi)) in lower.iter().zip(upper).enumerate() {
        if lo > hi {
            return Err(Error::Dataset(format!(
                "inverted interval at row {i}: [{lo}, {hi}]"
            )));
        }
    }
    Ok(())
}

/// Prediction interval coverage probability: the fraction of targets falling
/// inside their closed interval `[lower_i, upper_i]`. Boundary hits count as
/// covered.
pub fn picp(targets: &[f64], lower: &[f64], upper: &[f64]) -> Result<f64> {
    check_bounds(lower, upper)?;
    if targets.len() != lower.len() {
        return Err(Error::Dataset(format!(
            "length mismatch: {} targets vs {} intervals",
            targets.len(),
            lower.len()
        )));
    }
    let covered = targets
        .iter()
        .zip(lower.iter().zip(upper))
        .filter(|&(t, (lo, hi))| lo <= t && t <= hi)
        .count();
    Ok(covered as f64 / targets.len() as f64)
}

/// Prediction interval normalized average width: mean width divided by the
/// range `R` of the observed data.
pub fn pinaw(lower: &[f64], upper: &[f64], range: f64) -> Result<f64> {
    check_bounds(lower, upper)?;
    if range <= 0.0 || range.is_nan() {
        return Err(Error::domain(
            "range",
            format!("observed data range must be positive, got {range}"),
        ));
    }
    let total: f64 = lower.iter().zip(upper).map(|(lo, hi)| hi - lo).sum();
    Ok(total / (range * lower.len() as f64))
}

/// Range `max - min` of an observed sample, used to normalize PINAW.
pub fn target_range(targets: &[f64]) -> Result<f64> {
    if targets.is_empty() {
        return Err(Error::Dataset("range of an empty sample".into()));
    }
    let min = targets.iter().copied().fold(f64::INFINITY, f64::min);
    let max = targets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(max - min)
}

/// Coverage width-based criterion:
/// `pinaw * (1 + e^{eta (mu - picp)})` when coverage falls short of the
/// nominal level `mu`, plain `pinaw` otherwise. The branch point is
/// discontinuous as defined; see the tests.
pub fn cwc(picp: f64, pinaw: f64, nominal_coverage: f64, eta: f64) -> f64 {
    if picp < nominal_coverage {
        pinaw * (1.0 + (eta * (nominal_coverage - picp)).exp())
    } else {
        pinaw
    }
}

/// Symmetrically widen each interval so its width grows by exactly
/// `pad_fraction`.
pub fn pad_intervals(
    lower: &[f64],
    upper: &[f64],
    pad_fraction: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_bounds(lower, upper)?;
    if pad_fraction < 0.0 || pad_fraction.is_nan() {
        return Err(Error::domain(
            "pad_fraction",
            format!("must be >= 0, got {pad_fraction}"),
        ));
    }
    let half = pad_fraction / 2.0;
    let padded_lower = lower
        .iter()
        .zip(upper)
        .map(|(lo, hi)| lo - half * (hi - lo))
        .collect();
    let padded_upper = lower
        .iter()
        .zip(upper)
        .map(|(lo, hi)| hi + half * (hi - lo))
        .collect();
    Ok((padded_lower, padded_upper))
}

/// Repair rows where two independently trained bound models crossed, by
/// swapping the pair. Returns how many rows were repaired.
pub fn repair_crossings(lower: &mut [f64], upper: &mut [f64]) -> usize {
    let mut repaired = 0;
    for (lo, hi) in lower.iter_mut().zip(upper.iter_mut()) {
        if *lo > *hi {
            std::mem::swap(lo, hi);
            repaired += 1;
        }
    }
    repaired
}

/// Root mean squared error and coefficient of determination. `r_squared` is
/// `None` when the targets have zero variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMetrics {
    pub rmse: f64,
    pub r_squared: Option<f64>,
}

pub fn point_metrics(targets: &[f64], predictions: &[f64]) -> Result<PointMetrics> {
    if targets.len() != predictions.len() || targets.is_empty() {
        return Err(Error::Dataset(format!(
            "length mismatch: {} targets vs {} predictions",
            targets.len(),
            predictions.len()
        )));
    }
    let n = targets.len() as f64;
    let ss_res: f64 = targets
        .iter()
        .zip(predictions)
        .map(|(t, p)| (t - p) * (t - p))
        .sum();
    let mean = targets.iter().sum::<f64>() / n;
    let ss_tot: f64 = targets.iter().map(|t| (t - mean) * (t - mean)).sum();
    let r_squared = if ss_tot > 0.0 { Some(1.0 - ss_res / ss_tot) } else { None };
    Ok(PointMetrics { rmse: (ss_res / n).sqrt(), r_squared })
}

/// Compute a full interval report for one split, normalizing PINAW by the
/// range of this split's own targets.
pub fn interval_report(
    targets: &[f64],
    lower: &[f64],
    upper: &[f64],
    nominal_coverage: f64,
    eta: f64,
) -> Result<IntervalReport> {
    let picp = picp(targets, lower, upper)?;
    let pinaw = pinaw(lower, upper, target_range(targets)?)?;
    Ok(IntervalReport {
        picp,
        pinaw,
        cwc: cwc(picp, pinaw, nominal_coverage, eta),
        nominal_coverage,
        eta,
    })
}
