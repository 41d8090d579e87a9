use super::Vec3;
use crate::error::{Error, Result};
use crate::frame_io::{BitMask, CameraIntrinsics, DepthFrame};

/// Points in millimetres in the camera frame (x right, y down, z forward).
/// Every point is finite and in front of the camera.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    points: Vec<Vec3>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec3>) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
                return Err(Error::validation("points", format!("point {i} is not finite")));
            }
            if p.z <= 0.0 {
                return Err(Error::validation(
                    "points",
                    format!("point {i} has z = {} (must be in front of the camera)", p.z),
                ));
            }
        }
        Ok(PointCloud { points })
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn centroid(&self) -> Option<Vec3> {
        if self.points.is_empty() {
            return None;
        }
        let sum = self.points.iter().fold(Vec3::zeros(), |acc, p| acc + p);
        Some(sum / self.points.len() as f64)
    }

    /// Keeps the points for which `keep` is true, preserving order.
    pub fn filtered(&self, mut keep: impl FnMut(&Vec3) -> bool) -> PointCloud {
        PointCloud {
            points: self.points.iter().copied().filter(|p| keep(p)).collect(),
        }
    }

    pub fn concat<'a>(clouds: impl IntoIterator<Item = &'a PointCloud>) -> PointCloud {
        PointCloud {
            points: clouds.into_iter().flat_map(|c| c.points.iter().copied()).collect(),
        }
    }

    pub fn into_points(self) -> Vec<Vec3> {
        self.points
    }
}

/// Back-projects every masked pixel with a valid depth return through the
/// pinhole model, sampling at pixel centres. Output follows row-major pixel
/// order.
pub fn backproject(
    depth: &DepthFrame,
    intrinsics: &CameraIntrinsics,
    mask: &BitMask,
) -> Result<PointCloud> {
    let cam = (intrinsics.width, intrinsics.height);
    if (depth.width, depth.height) != cam {
        return Err(Error::DimensionMismatch {
            expected: cam,
            found: (depth.width, depth.height),
        });
    }
    if mask.dims() != cam {
        return Err(Error::DimensionMismatch {
            expected: cam,
            found: mask.dims(),
        });
    }
    let points = mask
        .iter_set()
        .filter_map(|(u, v)| {
            let raw = depth.get(u, v);
            (raw > 0).then(|| intrinsics.pixel_ray(u, v) * (raw as f64 * intrinsics.depth_scale))
        })
        .collect();
    Ok(PointCloud { points })
}
