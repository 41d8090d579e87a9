use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::{read_file, write_atomic};
use crate::error::{Error, Result};

fn default_depth_scale() -> f64 {
    1.0
}

/// Pinhole intrinsics of the depth camera plus the raw-unit to millimetre
/// scale of its depth images.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    pub width: u32,
    pub height: u32,
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    /// Millimetres per raw depth unit.
    #[serde(default = "default_depth_scale")]
    pub depth_scale: f64,
}

impl CameraIntrinsics {
    /// Azure Kinect NFOV unbinned depth resolution (640×576) with a 600 px
    /// focal length and centred principal point.
    pub fn azure_nfov() -> Self {
        CameraIntrinsics {
            width: 640,
            height: 576,
            fx: 600.0,
            fy: 600.0,
            cx: 320.0,
            cy: 288.0,
            depth_scale: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.width < 1 {
            return Err(Error::validation("width", "must be at least 1"));
        }
        if self.height < 1 {
            return Err(Error::validation("height", "must be at least 1"));
        }
        if !(self.fx.is_finite() && self.fx > 0.0) {
            return Err(Error::validation("fx", "must be finite and positive"));
        }
        if !(self.fy.is_finite() && self.fy > 0.0) {
            return Err(Error::validation("fy", "must be finite and positive"));
        }
        if !(self.cx >= 0.0 && self.cx < self.width as f64) {
            return Err(Error::validation("cx", "must lie in [0, width)"));
        }
        if !(self.cy >= 0.0 && self.cy < self.height as f64) {
            return Err(Error::validation("cy", "must lie in [0, height)"));
        }
        if !(self.depth_scale.is_finite() && self.depth_scale > 0.0) {
            return Err(Error::validation("depth_scale", "must be finite and positive"));
        }
        Ok(())
    }

    /// Ray through the centre of pixel `(u, v)`, scaled so that its z component is 1.
    pub fn pixel_ray(&self, u: u32, v: u32) -> Vector3<f64> {
        Vector3::new(
            (u as f64 + 0.5 - self.cx) / self.fx,
            (v as f64 + 0.5 - self.cy) / self.fy,
            1.0,
        )
    }

    /// Projects a camera-frame point to continuous pixel coordinates where the
    /// centre of pixel `(u, v)` is `(u + 0.5, v + 0.5)`.
    pub fn project(&self, p: &Vector3<f64>) -> (f64, f64) {
        (self.fx * p.x / p.z + self.cx, self.fy * p.y / p.z + self.cy)
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }
}

pub fn load_intrinsics(path: &Path) -> Result<CameraIntrinsics> {
    let bytes = read_file(path)?;
    let intr: CameraIntrinsics =
        serde_json::from_slice(&bytes).map_err(|e| Error::parse(path.display().to_string(), e))?;
    intr.validate()?;
    Ok(intr)
}

pub fn save_intrinsics(path: &Path, intrinsics: &CameraIntrinsics) -> Result<()> {
    let mut text = serde_json::to_string_pretty(intrinsics)
        .map_err(|e| Error::parse(path.display().to_string(), e))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}
