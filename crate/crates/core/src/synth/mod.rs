//! Synthetic scenes with analytically known geometry: cylinder point clouds
//! and ray-cast depth/mask/truth frame sets in the on-disk input formats.

mod cylinder;
mod render;
mod scenes;

pub use cylinder::{make_cylinder_cloud, try_make_cylinder_cloud, Arc, CylinderSpec};
pub use render::{
    intersect_cylinder, render_frame, render_scene, write_frame_set, RenderedFrame, SceneSpec,
    FramePaths,
};
pub use scenes::{orchard_frame, orchard_scene_set, OrchardParams};
