//! Loading and writing of every on-disk input: camera intrinsics, 16-bit depth
//! PNGs, instance annotations with run-length-encoded masks, and caliper truth
//! tables. Loaders validate fully; nothing partially valid is returned.

mod annotations;
mod depth;
mod intrinsics;
mod mask;
mod measurements;
mod truth;

use std::io::Write;
use std::path::Path;

pub use annotations::{
    load_annotations, save_annotations, FrameAnnotations, InstanceAnnotation, InstanceClass,
};
pub use depth::{decode_depth_png, encode_depth_png, load_depth, save_depth, DepthFrame};
pub use intrinsics::{load_intrinsics, save_intrinsics, CameraIntrinsics};
pub use mask::{decode_rle, encode_rle, BitMask};
pub use measurements::{
    encode_measurements, load_measurements, write_measurements, MeasurementRow, MEASUREMENT_HEADER,
};
pub use truth::{load_truth, write_truth, TruthRecord};

use crate::error::{Error, Result};

/// Writes `bytes` to a sibling temporary file and renames it over `path`, so a
/// failed write never leaves a truncated file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.flush().map_err(|e| Error::io(tmp.path(), e))?;
    // Temporary files start private; outputs get ordinary permissions.
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file()
            .set_permissions(std::fs::Permissions::from_mode(0o644))
            .map_err(|e| Error::io(tmp.path(), e))?;
    }
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}
