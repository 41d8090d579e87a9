use super::MeasureConfig;
use crate::cloud_geom::{PointCloud, Vec3};
use crate::error::{Error, Result};

/// Half-width increment used when the initial slab is too sparse.
pub const SLAB_WIDEN_STEP_MM: f64 = 2.5;

/// Point on the branch axis where the diameter is measured.
pub fn measurement_locus(junction: &Vec3, away: &Vec3, config: &MeasureConfig) -> Vec3 {
    junction + away * config.junction_offset_mm
}

/// Points within a half-width `h` of the plane through `locus` normal to `axis`.
///
/// Starts at `slab_half_width_mm` and widens in 2.5 mm steps up to
/// `slab_max_half_width_mm` until `min_slab_points` are captured. Returns the
/// slab together with the half-width that produced it.
pub fn slab_points(
    cloud: &PointCloud,
    locus: &Vec3,
    axis: &Vec3,
    config: &MeasureConfig,
) -> Result<(PointCloud, f64)> {
    let mut h = config.slab_half_width_mm;
    loop {
        let slab = filter_slab(cloud, locus, axis, h);
        if slab.len() >= config.min_slab_points {
            return Ok((slab, h));
        }
        if h >= config.slab_max_half_width_mm {
            return Err(Error::InsufficientPoints {
                needed: config.min_slab_points,
                found: slab.len(),
            });
        }
        h = (h + SLAB_WIDEN_STEP_MM).min(config.slab_max_half_width_mm);
    }
}

pub(crate) fn filter_slab(cloud: &PointCloud, locus: &Vec3, axis: &Vec3, h: f64) -> PointCloud {
    cloud.filtered(|p| (p - locus).dot(axis).abs() <= h)
}
