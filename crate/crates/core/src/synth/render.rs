use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::CylinderSpec;
use crate::cloud_geom::Vec3;
use crate::error::{Error, Result};
use crate::frame_io::{
    save_annotations, save_depth, save_intrinsics, write_truth, BitMask, CameraIntrinsics,
    DepthFrame, FrameAnnotations, InstanceAnnotation, InstanceClass, TruthRecord,
};
use crate::limb_metrics::{crop_load, lcsa_from_diameter, DEFAULT_FRUIT_DENSITY_PER_CM2};

/// One synthetic frame: camera, capped cylinders, and the depth noise model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub frame_id: String,
    pub intrinsics: CameraIntrinsics,
    pub cylinders: Vec<CylinderSpec>,
    /// Standard deviation of additive Gaussian noise on the ray depth.
    pub depth_noise_sigma_mm: f64,
    pub rng_seed: u64,
    /// Optional fronto-parallel plane at this depth behind the cylinders.
    /// Pixels that hit it get depth but belong to no mask.
    #[serde(default)]
    pub backdrop_mm: Option<f64>,
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        self.intrinsics.validate()?;
        if self.cylinders.is_empty() {
            return Err(Error::validation("cylinders", "scene needs at least one cylinder"));
        }
        for c in &self.cylinders {
            c.validate()?;
            let r = c.radius();
            if c.base.z - r <= 0.0 || c.end().z - r <= 0.0 {
                return Err(Error::validation(
                    "cylinders",
                    format!("{} is not entirely in front of the camera", c.instance_id),
                ));
            }
        }
        if !(self.depth_noise_sigma_mm.is_finite() && self.depth_noise_sigma_mm >= 0.0) {
            return Err(Error::validation("depth_noise_sigma_mm", "must be non-negative"));
        }
        if let Some(b) = self.backdrop_mm {
            if !(b.is_finite() && b > 0.0) {
                return Err(Error::validation("backdrop_mm", "must be positive"));
            }
        }
        Ok(())
    }
}

/// Smallest positive ray parameter where `origin + t·dir` meets the capped
/// cylinder. With the camera at the origin and `dir.z = 1`, `t` is the depth.
pub fn intersect_cylinder(dir: &Vec3, cyl: &CylinderSpec) -> Option<f64> {
    let a = cyl.axis;
    let r = cyl.radius();
    let w = -cyl.base;
    let dp = dir - a * dir.dot(&a);
    let wp = w - a * w.dot(&a);
    let mut best: Option<f64> = None;
    let mut consider = |t: f64| {
        if t > 0.0 && best.is_none_or(|b| t < b) {
            best = Some(t);
        }
    };

    let qa = dp.dot(&dp);
    if qa > 0.0 {
        let qb = 2.0 * dp.dot(&wp);
        let qc = wp.dot(&wp) - r * r;
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            for t in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
                let s = (w + dir * t).dot(&a);
                if (0.0..=cyl.length_mm).contains(&s) {
                    consider(t);
                }
            }
        }
    }

    let da = dir.dot(&a);
    if da != 0.0 {
        for s_cap in [0.0, cyl.length_mm] {
            let t = (s_cap - w.dot(&a)) / da;
            let rel = w + dir * t - a * s_cap;
            if rel.norm_squared() <= r * r {
                consider(t);
            }
        }
    }
    best
}

/// In-memory rendering of a [`SceneSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct RenderedFrame {
    pub depth: DepthFrame,
    pub annotations: FrameAnnotations,
    pub truth: Vec<TruthRecord>,
}

const NO_HIT: u32 = u32::MAX;
const BACKDROP: u32 = u32::MAX - 1;

/// Ray-casts every pixel centre, keeps the nearest surface, and quantizes the
/// (noisy) depth to raw units. Cylinders that end up with no visible pixel are
/// dropped from the annotations and truth.
pub fn render_frame(scene: &SceneSpec) -> Result<RenderedFrame> {
    scene.validate()?;
    let intr = &scene.intrinsics;
    let (w, h) = (intr.width, intr.height);

    let hits: Vec<(u32, f64)> = (0..h)
        .into_par_iter()
        .flat_map_iter(|v| {
            (0..w).map(move |u| {
                let dir = intr.pixel_ray(u, v);
                let mut best = (NO_HIT, f64::INFINITY);
                for (i, c) in scene.cylinders.iter().enumerate() {
                    if let Some(t) = intersect_cylinder(&dir, c) {
                        if t < best.1 {
                            best = (i as u32, t);
                        }
                    }
                }
                if let Some(b) = scene.backdrop_mm {
                    if b < best.1 {
                        best = (BACKDROP, b);
                    }
                }
                best
            })
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(scene.rng_seed);
    let noise = Normal::new(0.0, scene.depth_noise_sigma_mm).expect("sigma validated");
    let mut values = vec![0u16; hits.len()];
    for (value, &(id, z)) in values.iter_mut().zip(&hits) {
        if id == NO_HIT {
            continue;
        }
        let z = if scene.depth_noise_sigma_mm > 0.0 {
            z + noise.sample(&mut rng)
        } else {
            z
        };
        *value = (z / intr.depth_scale).round().clamp(1.0, u16::MAX as f64) as u16;
    }

    let mut instances = Vec::new();
    let mut truth = Vec::new();
    for (i, c) in scene.cylinders.iter().enumerate() {
        let bits: Vec<bool> = hits.iter().map(|&(id, _)| id == i as u32).collect();
        if !bits.iter().any(|&b| b) {
            log::warn!("{}: {} is not visible; skipped", scene.frame_id, c.instance_id);
            continue;
        }
        instances.push(InstanceAnnotation {
            instance_id: c.instance_id.clone(),
            class: c.class,
            score: 1.0,
            mask: BitMask::new(w, h, bits)?,
        });
        if c.class == InstanceClass::Branch {
            let lcsa = lcsa_from_diameter(c.diameter_mm)?;
            truth.push(TruthRecord {
                frame_id: scene.frame_id.clone(),
                instance_id: c.instance_id.clone(),
                diameter_mm: c.diameter_mm,
                crop_load: Some(crop_load(lcsa, DEFAULT_FRUIT_DENSITY_PER_CM2)),
            });
        }
    }

    Ok(RenderedFrame {
        depth: DepthFrame::new(w, h, values)?,
        annotations: FrameAnnotations {
            frame_id: scene.frame_id.clone(),
            width: w,
            height: h,
            instances,
        },
        truth,
    })
}

/// Locations of a written frame set.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePaths {
    pub intrinsics: PathBuf,
    pub depth_dir: PathBuf,
    pub annotations_dir: PathBuf,
    pub truth: PathBuf,
}

impl FramePaths {
    pub fn under(root: &Path) -> Self {
        FramePaths {
            intrinsics: root.join("intrinsics.json"),
            depth_dir: root.join("depth"),
            annotations_dir: root.join("annotations"),
            truth: root.join("truth.csv"),
        }
    }
}

/// Writes frames in the on-disk input layout:
/// `intrinsics.json`, `depth/<frame>.png`, `annotations/<frame>.json` and a
/// combined `truth.csv`.
pub fn write_frame_set(
    out_dir: &Path,
    intrinsics: &CameraIntrinsics,
    frames: &[RenderedFrame],
) -> Result<FramePaths> {
    let paths = FramePaths::under(out_dir);
    for dir in [out_dir, &paths.depth_dir, &paths.annotations_dir] {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    save_intrinsics(&paths.intrinsics, intrinsics)?;
    let mut truth = Vec::new();
    for f in frames {
        let id = &f.annotations.frame_id;
        save_depth(&paths.depth_dir.join(format!("{id}.png")), &f.depth)?;
        save_annotations(&paths.annotations_dir.join(format!("{id}.json")), &f.annotations)?;
        truth.extend(f.truth.iter().cloned());
    }
    write_truth(&paths.truth, &truth)?;
    Ok(paths)
}

/// Renders one scene and writes it under `out_dir`.
pub fn render_scene(scene: &SceneSpec, out_dir: &Path) -> Result<FramePaths> {
    let frame = render_frame(scene)?;
    write_frame_set(out_dir, &scene.intrinsics, std::slice::from_ref(&frame))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud_geom::backproject;

    fn horizontal_branch(z_axis: f64, d: f64) -> CylinderSpec {
        CylinderSpec {
            base: Vec3::new(-150.0, 0.0, z_axis),
            axis: Vec3::x(),
            diameter_mm: d,
            length_mm: 300.0,
            class: InstanceClass::Branch,
            instance_id: "branch_0".into(),
        }
    }

    fn scene(cylinders: Vec<CylinderSpec>, sigma: f64) -> SceneSpec {
        SceneSpec {
            frame_id: "f0".into(),
            intrinsics: CameraIntrinsics::azure_nfov(),
            cylinders,
            depth_noise_sigma_mm: sigma,
            rng_seed: 5,
            backdrop_mm: None,
        }
    }

    #[test]
    fn silhouette_centre_depth() {
        let f = render_frame(&scene(vec![horizontal_branch(1000.0, 20.0)], 0.0)).unwrap();
        // The centre of pixel (320, 287) sits half a pixel above the principal
        // point, so its ray meets the cylinder slightly behind 1000 - r:
        // (t / 1200)^2 + (t - 1000)^2 = 100.
        let raw = f.depth.get(320, 287) as f64;
        let ray = CameraIntrinsics::azure_nfov().pixel_ray(320, 287);
        let exact = intersect_cylinder(&ray, &horizontal_branch(1000.0, 20.0)).unwrap();
        assert!((exact - 990.0340917060663).abs() < 1e-9);
        assert!((raw - 990.0).abs() <= 1.0);
    }

    #[test]
    fn occluder_owns_overlap() {
        let back = horizontal_branch(1000.0, 20.0);
        let trunk = CylinderSpec {
            base: Vec3::new(0.0, -300.0, 900.0),
            axis: Vec3::y(),
            diameter_mm: 60.0,
            length_mm: 600.0,
            class: InstanceClass::Trunk,
            instance_id: "trunk_0".into(),
        };
        let f = render_frame(&scene(vec![back, trunk], 0.0)).unwrap();
        let ann = &f.annotations.instances;
        assert_eq!(ann.len(), 2);
        let (branch, trunk) = (&ann[0].mask, &ann[1].mask);
        assert!(branch.bits.iter().zip(&trunk.bits).all(|(a, b)| !(*a && *b)));
        // The principal column is trunk only.
        assert!(trunk.get(320, 288) && !branch.get(320, 288));
        assert_eq!(f.truth.len(), 1);
    }

    #[test]
    fn backprojected_points_lie_on_surface() {
        let c = CylinderSpec {
            base: Vec3::new(-120.0, 60.0, 950.0),
            axis: Vec3::new(1.0, -0.5, 0.3).normalize(),
            diameter_mm: 24.0,
            length_mm: 260.0,
            class: InstanceClass::Branch,
            instance_id: "branch_0".into(),
        };
        let s = scene(vec![c.clone()], 0.0);
        let f = render_frame(&s).unwrap();
        let cloud = backproject(&f.depth, &s.intrinsics, &f.annotations.instances[0].mask).unwrap();
        assert!(cloud.len() > 500);
        for p in cloud.points() {
            let w = p - c.base;
            let s_ax = w.dot(&c.axis);
            let radial = c.distance_to_axis(p);
            let on_side = (radial - 12.0).abs();
            let on_cap = if radial <= 12.5 { s_ax.abs().min((s_ax - c.length_mm).abs()) } else { f64::INFINITY };
            assert!(on_side.min(on_cap) < 0.5, "point {p:?} off surface");
        }
    }

    #[test]
    fn masked_pixels_have_depth_and_background_is_empty() {
        let s = scene(vec![horizontal_branch(1000.0, 20.0)], 2.0);
        let f = render_frame(&s).unwrap();
        let m = &f.annotations.instances[0].mask;
        for (bit, &d) in m.bits.iter().zip(&f.depth.values) {
            assert_eq!(*bit, d > 0);
        }
    }

    #[test]
    fn backdrop_fills_unmasked_pixels() {
        let mut s = scene(vec![horizontal_branch(1000.0, 20.0)], 0.0);
        s.backdrop_mm = Some(1400.0);
        let f = render_frame(&s).unwrap();
        assert_eq!(f.depth.get(5, 5), 1400);
        assert!(!f.annotations.instances[0].mask.get(5, 5));
    }

    #[test]
    fn invisible_cylinder_dropped() {
        let hidden = CylinderSpec {
            base: Vec3::new(5000.0, 0.0, 1000.0),
            ..horizontal_branch(1000.0, 20.0)
        };
        let s = scene(vec![hidden], 0.0);
        let f = render_frame(&s).unwrap();
        assert!(f.annotations.instances.is_empty());
        assert!(f.truth.is_empty());
    }

    #[test]
    fn behind_camera_rejected() {
        let s = scene(vec![horizontal_branch(-10.0, 20.0)], 0.0);
        assert!(render_frame(&s).is_err());
    }

    #[test]
    fn writes_are_deterministic() {
        let s = scene(vec![horizontal_branch(1000.0, 20.0)], 2.0);
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let pa = render_scene(&s, a.path()).unwrap();
        let pb = render_scene(&s, b.path()).unwrap();
        for (x, y) in [
            (pa.truth, pb.truth),
            (pa.intrinsics, pb.intrinsics),
            (pa.depth_dir.join("f0.png"), pb.depth_dir.join("f0.png")),
            (pa.annotations_dir.join("f0.json"), pb.annotations_dir.join("f0.json")),
        ] {
            assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
        }
    }
}
