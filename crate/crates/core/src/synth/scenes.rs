use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CylinderSpec, SceneSpec};
use crate::cloud_geom::Vec3;
use crate::frame_io::{CameraIntrinsics, InstanceClass};

/// Maximum branches per generated frame; one per attachment height.
pub const MAX_BRANCHES_PER_FRAME: usize = 5;
const ATTACH_HEIGHTS_MM: [f64; MAX_BRANCHES_PER_FRAME] = [-250.0, 250.0, 0.0, -125.0, 125.0];

/// Parameters of the trellis-style scenes used for closure tests: one
/// vertical trunk about 1 m from the camera with branches leaving it on
/// alternating sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrchardParams {
    pub intrinsics: CameraIntrinsics,
    pub branch_diameter_range_mm: (f64, f64),
    pub trunk_diameter_range_mm: (f64, f64),
    /// Distance from the camera to the front of the trunk.
    pub trunk_front_range_mm: (f64, f64),
    /// Branch length measured from the trunk axis.
    pub branch_length_mm: f64,
    /// Upward tilt of branches from horizontal, degrees.
    pub elevation_range_deg: (f64, f64),
    /// Tilt towards or away from the camera, degrees.
    pub depth_tilt_range_deg: (f64, f64),
    pub depth_noise_sigma_mm: f64,
    pub backdrop_mm: Option<f64>,
}

impl Default for OrchardParams {
    fn default() -> Self {
        OrchardParams {
            intrinsics: CameraIntrinsics::azure_nfov(),
            branch_diameter_range_mm: (10.0, 30.0),
            trunk_diameter_range_mm: (60.0, 80.0),
            trunk_front_range_mm: (980.0, 1020.0),
            branch_length_mm: 230.0,
            elevation_range_deg: (15.0, 45.0),
            depth_tilt_range_deg: (-20.0, 20.0),
            depth_noise_sigma_mm: 2.0,
            backdrop_mm: None,
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

/// One frame with a trunk and `n_branches` (clamped to 1..=5) branches.
pub fn orchard_frame(frame_id: &str, n_branches: usize, params: &OrchardParams, seed: u64) -> SceneSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = n_branches.clamp(1, MAX_BRANCHES_PER_FRAME);

    let trunk_d = uniform(&mut rng, params.trunk_diameter_range_mm);
    let trunk_x = rng.random_range(-40.0..40.0);
    let trunk_z = uniform(&mut rng, params.trunk_front_range_mm) + trunk_d / 2.0;
    let mut cylinders = vec![CylinderSpec {
        base: Vec3::new(trunk_x, -700.0, trunk_z),
        axis: Vec3::y(),
        diameter_mm: trunk_d,
        length_mm: 1400.0,
        class: InstanceClass::Trunk,
        instance_id: "trunk_0".into(),
    }];

    for (i, &y) in ATTACH_HEIGHTS_MM.iter().take(n).enumerate() {
        let side = if i % 2 == 0 { 1.0 } else { -1.0 };
        let elevation = uniform(&mut rng, params.elevation_range_deg).to_radians();
        let tilt = uniform(&mut rng, params.depth_tilt_range_deg).to_radians();
        let d = uniform(&mut rng, params.branch_diameter_range_mm);
        let axis = Vec3::new(
            side * elevation.cos() * tilt.cos(),
            -elevation.sin(),
            elevation.cos() * tilt.sin(),
        )
        .normalize();
        cylinders.push(CylinderSpec {
            base: Vec3::new(trunk_x, y, trunk_z),
            axis,
            diameter_mm: d,
            length_mm: params.branch_length_mm,
            class: InstanceClass::Branch,
            instance_id: format!("branch_{i}"),
        });
    }

    SceneSpec {
        frame_id: frame_id.to_string(),
        intrinsics: params.intrinsics,
        cylinders,
        depth_noise_sigma_mm: params.depth_noise_sigma_mm,
        rng_seed: rng.random(),
        backdrop_mm: params.backdrop_mm,
    }
}

/// Enough frames to hold `total_branches`, five per frame, named
/// `frame_000`, `frame_001`, …
pub fn orchard_scene_set(total_branches: usize, params: &OrchardParams, seed: u64) -> Vec<SceneSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut remaining = total_branches;
    let mut scenes = Vec::new();
    while remaining > 0 {
        let k = remaining.min(MAX_BRANCHES_PER_FRAME);
        let id = format!("frame_{:03}", scenes.len());
        scenes.push(orchard_frame(&id, k, params, rng.random()));
        remaining -= k;
    }
    scenes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::render_frame;

    #[test]
    fn scene_set_sizes() {
        let p = OrchardParams::default();
        let set = orchard_scene_set(12, &p, 1);
        assert_eq!(set.len(), 3);
        let branches: usize = set
            .iter()
            .map(|s| s.cylinders.iter().filter(|c| c.class == InstanceClass::Branch).count())
            .sum();
        assert_eq!(branches, 12);
        assert_eq!(set, orchard_scene_set(12, &p, 1));
        for s in &set {
            s.validate().unwrap();
        }
    }

    #[test]
    fn every_branch_is_visible() {
        let p = OrchardParams::default();
        for s in orchard_scene_set(10, &p, 77) {
            let f = render_frame(&s).unwrap();
            assert_eq!(f.annotations.instances.len(), s.cylinders.len());
            assert_eq!(f.truth.len(), s.cylinders.len() - 1);
        }
    }
}
