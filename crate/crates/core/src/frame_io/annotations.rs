use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{decode_rle, encode_rle, read_file, write_atomic, BitMask};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceClass {
    Trunk,
    Branch,
}

impl InstanceClass {
    pub const ALL: [InstanceClass; 2] = [InstanceClass::Trunk, InstanceClass::Branch];

    pub fn as_str(self) -> &'static str {
        match self {
            InstanceClass::Trunk => "trunk",
            InstanceClass::Branch => "branch",
        }
    }
}

impl fmt::Display for InstanceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One segmented object.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceAnnotation {
    pub instance_id: String,
    pub class: InstanceClass,
    /// Detector confidence in `[0, 1]`; 1 for ground truth.
    pub score: f64,
    pub mask: BitMask,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameAnnotations {
    pub frame_id: String,
    pub width: u32,
    pub height: u32,
    pub instances: Vec<InstanceAnnotation>,
}

impl FrameAnnotations {
    pub fn of_class(&self, class: InstanceClass) -> impl Iterator<Item = &InstanceAnnotation> {
        self.instances.iter().filter(move |i| i.class == class)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for inst in &self.instances {
            if !seen.insert(inst.instance_id.as_str()) {
                return Err(Error::validation(
                    "instance_id",
                    format!("duplicate instance_id {:?}", inst.instance_id),
                ));
            }
            if !(0.0..=1.0).contains(&inst.score) {
                return Err(Error::validation(
                    "score",
                    format!("{} outside [0, 1] for {}", inst.score, inst.instance_id),
                ));
            }
            if inst.mask.dims() != (self.width, self.height) {
                return Err(Error::DimensionMismatch {
                    expected: (self.width, self.height),
                    found: inst.mask.dims(),
                });
            }
            if inst.mask.is_empty() {
                return Err(Error::validation(
                    "mask",
                    format!("empty mask for {}", inst.instance_id),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    instance_id: String,
    class: InstanceClass,
    score: f64,
    rle: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct RawFrame {
    frame_id: String,
    width: u32,
    height: u32,
    instances: Vec<RawInstance>,
}

pub fn load_annotations(path: &Path) -> Result<FrameAnnotations> {
    let bytes = read_file(path)?;
    let context = path.display().to_string();
    let raw: RawFrame = serde_json::from_slice(&bytes).map_err(|e| Error::parse(&context, e))?;
    if raw.width == 0 || raw.height == 0 {
        return Err(Error::validation("width/height", "frame dimensions must be positive"));
    }
    let instances = raw
        .instances
        .into_iter()
        .map(|ri| {
            let mask = decode_rle(&ri.rle, raw.width, raw.height)?;
            Ok(InstanceAnnotation {
                instance_id: ri.instance_id,
                class: ri.class,
                score: ri.score,
                mask,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let frame = FrameAnnotations {
        frame_id: raw.frame_id,
        width: raw.width,
        height: raw.height,
        instances,
    };
    frame.validate()?;
    Ok(frame)
}

pub fn save_annotations(path: &Path, frame: &FrameAnnotations) -> Result<()> {
    let raw = RawFrame {
        frame_id: frame.frame_id.clone(),
        width: frame.width,
        height: frame.height,
        instances: frame
            .instances
            .iter()
            .map(|i| RawInstance {
                instance_id: i.instance_id.clone(),
                class: i.class,
                score: i.score,
                rle: encode_rle(&i.mask),
            })
            .collect(),
    };
    let mut text =
        serde_json::to_string(&raw).map_err(|e| Error::parse(path.display().to_string(), e))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}
