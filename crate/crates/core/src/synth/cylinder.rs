use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::cloud_geom::{PointCloud, Vec3};
use crate::error::{Error, Result};
use crate::frame_io::InstanceClass;

/// Straight circular cylinder starting at `base` and running `length_mm`
/// along `axis`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderSpec {
    pub base: Vec3,
    pub axis: Vec3,
    pub diameter_mm: f64,
    pub length_mm: f64,
    pub class: InstanceClass,
    pub instance_id: String,
}

impl CylinderSpec {
    pub fn radius(&self) -> f64 {
        self.diameter_mm / 2.0
    }

    pub fn end(&self) -> Vec3 {
        self.base + self.axis * self.length_mm
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.diameter_mm.is_finite() && self.diameter_mm > 0.0) {
            return Err(Error::validation("diameter_mm", "must be positive"));
        }
        if !(self.length_mm.is_finite() && self.length_mm > 0.0) {
            return Err(Error::validation("length_mm", "must be positive"));
        }
        if self.diameter_mm >= self.length_mm {
            return Err(Error::validation("diameter_mm", "must be smaller than length_mm"));
        }
        if (self.axis.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::validation("axis", "must be a unit vector"));
        }
        Ok(())
    }

    /// Distance from `p` to the infinite axis line.
    pub fn distance_to_axis(&self, p: &Vec3) -> f64 {
        let w = p - self.base;
        (w - self.axis * w.dot(&self.axis)).norm()
    }

    /// Unit vectors `(f, g)` spanning the plane normal to the axis, with `f`
    /// pointing from the axis midpoint towards the camera origin when possible.
    pub(crate) fn facing_basis(&self) -> (Vec3, Vec3) {
        let mid = self.base + self.axis * (self.length_mm / 2.0);
        let to_cam = -mid;
        let mut f = to_cam - self.axis * to_cam.dot(&self.axis);
        if f.norm() < 1e-9 {
            let helper = if self.axis.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
            f = helper - self.axis * helper.dot(&self.axis);
        }
        let f = f.normalize();
        (f, self.axis.cross(&f))
    }
}

/// Which part of the lateral surface is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arc {
    Full,
    /// Only the half of the circumference facing the camera.
    Half,
}

/// Samples `n` points uniformly over the lateral surface (or its
/// camera-facing half), then adds isotropic Gaussian noise. Deterministic for
/// a given seed.
pub fn make_cylinder_cloud(
    spec: &CylinderSpec,
    n: usize,
    arc: Arc,
    noise_sigma_mm: f64,
    seed: u64,
) -> (PointCloud, CylinderSpec) {
    try_make_cylinder_cloud(spec, n, arc, noise_sigma_mm, seed)
        .unwrap_or_else(|e| panic!("invalid cylinder request: {e}"))
}

/// Fallible form of [`make_cylinder_cloud`].
pub fn try_make_cylinder_cloud(
    spec: &CylinderSpec,
    n: usize,
    arc: Arc,
    noise_sigma_mm: f64,
    seed: u64,
) -> Result<(PointCloud, CylinderSpec)> {
    spec.validate()?;
    if n < 10 {
        return Err(Error::validation("n", "need at least 10 points"));
    }
    if !(noise_sigma_mm.is_finite() && noise_sigma_mm >= 0.0) {
        return Err(Error::validation("noise_sigma_mm", "must be non-negative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, noise_sigma_mm).expect("sigma validated");
    let (f, g) = spec.facing_basis();
    let r = spec.radius();
    let (lo, hi) = match arc {
        Arc::Full => (-std::f64::consts::PI, std::f64::consts::PI),
        Arc::Half => (-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2),
    };
    let points = (0..n)
        .map(|_| {
            let t = rng.random_range(0.0..spec.length_mm);
            let theta = rng.random_range(lo..hi);
            let mut p = spec.base + spec.axis * t + (f * theta.cos() + g * theta.sin()) * r;
            if noise_sigma_mm > 0.0 {
                p += Vec3::new(noise.sample(&mut rng), noise.sample(&mut rng), noise.sample(&mut rng));
            }
            p
        })
        .collect();
    Ok((PointCloud::new(points)?, spec.clone()))
}
