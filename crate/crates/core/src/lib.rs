//! Branch diameter, limb cross-sectional area (LCSA) and target crop-load
//! estimation from registered depth frames and trunk/branch instance masks.
//!
//! The pipeline is:
//!
//! 1. [`frame_io`] loads intrinsics, 16-bit depth PNGs, RLE instance masks and
//!    caliper truth tables.
//! 2. [`cloud_geom`] back-projects masked depth pixels into millimetre point
//!    clouds and extracts principal axes with a Jacobi eigensolver.
//! 3. [`limb_metrics`] finds the trunk-branch junction, cuts a slab normal to
//!    the branch axis 30 mm out, measures the diameter and converts it into
//!    LCSA and crop-load.
//! 4. [`eval`] scores segmentation (IoU matching, precision/recall/F1/AP) and
//!    geometry (RMSE, MAE, MAPE, Pearson r).
//! 5. [`synth`] renders cylinder scenes with known geometry for closure tests.
//! 6. [`cli`] wires everything behind the `cropload` binary.

pub mod cli;
pub mod cloud_geom;
pub mod error;
pub mod eval;
pub mod frame_io;
pub mod limb_metrics;
pub mod synth;

pub use error::{Error, Result};
