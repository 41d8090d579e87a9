use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{LimbFlag, MeasureConfig};
use crate::cloud_geom::{covariance3, principal_axes, PointCloud, Vec3};
use crate::error::{Error, Result};

/// Slabs with fewer points than this use the max − min extent.
pub const PERCENTILE_MIN_POINTS: usize = 20;
/// Absolute floor on slab size for any diameter estimate.
pub const MIN_DIAMETER_POINTS: usize = 4;

/// How the extent along the in-plane principal direction is turned into a
/// diameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpanMethod {
    /// `q(high) − q(low)` of the projections.
    Percentile,
    /// Percentile span with each tail extended linearly to the support edge,
    /// using the quantile slope between `q(low)` and `q(4·low)`.
    #[default]
    Extrapolated,
}

impl std::str::FromStr for SpanMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "percentile" => Ok(SpanMethod::Percentile),
            "extrapolated" => Ok(SpanMethod::Extrapolated),
            other => Err(format!("unknown span method {other:?}")),
        }
    }
}

/// Percentile of sorted data with linear interpolation between closest ranks
/// (rank `p/100 · (n − 1)`).
pub fn percentile_sorted(sorted: &[f64], pct: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let rank = (pct / 100.0).clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Quantile ratio over which the tail slope is measured.
const TAIL_SLOPE_SPAN: f64 = 4.0;

/// Edge of the support below the `pct` quantile (`pct` ≤ 12.5): steps back
/// from `q(pct)` by its Hazen plotting position times the quantile slope
/// between `q(pct)` and `q(4·pct)`.
fn extrapolated_low(sorted: &[f64], pct: f64) -> f64 {
    let n = sorted.len();
    let rank = pct / 100.0 * (n - 1) as f64;
    if rank <= 0.0 {
        return sorted[0];
    }
    let q1 = percentile_sorted(sorted, pct);
    let q2 = percentile_sorted(sorted, TAIL_SLOPE_SPAN * pct);
    let slope = (q2 - q1) / ((TAIL_SLOPE_SPAN - 1.0) * rank);
    q1 - (rank + 0.5) * slope
}

/// Robust extent of `values` (unsorted) between the given percentiles.
pub fn robust_span(values: &[f64], low_pct: f64, high_pct: f64, method: SpanMethod) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    match method {
        SpanMethod::Percentile => {
            percentile_sorted(&sorted, high_pct) - percentile_sorted(&sorted, low_pct)
        }
        SpanMethod::Extrapolated => {
            let lo = extrapolated_low(&sorted, low_pct);
            let negated: Vec<f64> = sorted.iter().rev().map(|v| -v).collect();
            let hi = -extrapolated_low(&negated, 100.0 - high_pct);
            hi - lo
        }
    }
}

/// Measures the branch width inside a slab.
///
/// Slab points are projected onto the plane normal to `axis`; the widest
/// in-plane direction is the leading eigenvector of the projected covariance,
/// and the diameter is the robust extent of the projections along it.
pub fn estimate_diameter(
    slab: &PointCloud,
    axis: &Vec3,
    config: &MeasureConfig,
) -> Result<(f64, BTreeSet<LimbFlag>)> {
    let n = slab.len();
    if n < MIN_DIAMETER_POINTS {
        return Err(Error::InsufficientPoints {
            needed: MIN_DIAMETER_POINTS,
            found: n,
        });
    }
    let a = axis.normalize();
    let planar: Vec<Vec3> = slab.points().iter().map(|p| p - a * p.dot(&a)).collect();
    let in_plane = principal_axes(&covariance3(&planar)?)?;
    let w = in_plane.primary();
    let proj: Vec<f64> = planar.iter().map(|p| p.dot(&w)).collect();

    let mut flags = BTreeSet::new();
    let diameter = if n < PERCENTILE_MIN_POINTS {
        flags.insert(LimbFlag::SparseFallbackMinMax);
        let (lo, hi) = proj
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        hi - lo
    } else {
        robust_span(&proj, config.span_low_pct, config.span_high_pct, config.span_method)
    };
    if !(diameter > 0.0) {
        return Err(Error::NonPositiveDiameter(diameter));
    }
    Ok((diameter, flags))
}
