use std::collections::BTreeSet;

use super::{PointCloud, Vec3};
use crate::error::{Error, Result};

/// Per-axis statistics used to standardize a cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationParams {
    pub mean: Vec3,
    /// Sample standard deviation (divisor n − 1) per axis.
    pub std: Vec3,
    /// Axes along which every point has the same coordinate.
    pub degenerate_axes: BTreeSet<usize>,
}

impl NormalizationParams {
    /// Per-axis mean and sample standard deviation of `points` (at least two).
    pub fn fit(points: &[Vec3]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::TooFewPoints {
                needed: 2,
                found: points.len(),
            });
        }
        let n = points.len() as f64;
        let mean = points.iter().fold(Vec3::zeros(), |acc, p| acc + p) / n;
        let mut std = Vec3::zeros();
        let mut degenerate_axes = BTreeSet::new();
        for axis in 0..3 {
            let first = points[0][axis];
            if points.iter().all(|p| p[axis] == first) {
                degenerate_axes.insert(axis);
                continue;
            }
            let ss: f64 = points.iter().map(|p| (p[axis] - mean[axis]).powi(2)).sum();
            std[axis] = (ss / (n - 1.0)).sqrt();
        }
        Ok(NormalizationParams {
            mean,
            std,
            degenerate_axes,
        })
    }

    pub fn apply(&self, p: &Vec3) -> Vec3 {
        let mut z = p - self.mean;
        for axis in 0..3 {
            z[axis] = if self.degenerate_axes.contains(&axis) {
                0.0
            } else {
                z[axis] / self.std[axis]
            };
        }
        z
    }

    /// Maps a direction expressed in standardized coordinates back to a unit
    /// direction in the original metric frame.
    pub fn destandardize_direction(&self, d: &Vec3) -> Vec3 {
        let m = d.component_mul(&self.std);
        let n = m.norm();
        if n > 0.0 {
            m / n
        } else {
            *d
        }
    }
}

/// Standardizes every axis to zero mean and unit sample standard deviation.
/// Constant axes are centred to zero and recorded as degenerate.
pub fn zscore(cloud: &PointCloud) -> Result<(Vec<Vec3>, NormalizationParams)> {
    let params = NormalizationParams::fit(cloud.points())?;
    let z = cloud.points().iter().map(|p| params.apply(p)).collect();
    Ok((z, params))
}
