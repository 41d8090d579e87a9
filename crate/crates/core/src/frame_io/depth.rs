use std::path::Path;

use super::{read_file, write_atomic, CameraIntrinsics};
use crate::error::{Error, Result};

/// Raw depth image, row-major, one `u16` per pixel. Zero marks a pixel with no
/// return. Values are kept in sensor units; multiply by
/// [`CameraIntrinsics::depth_scale`] for millimetres.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthFrame {
    pub width: u32,
    pub height: u32,
    pub values: Vec<u16>,
}

impl DepthFrame {
    pub fn new(width: u32, height: u32, values: Vec<u16>) -> Result<Self> {
        let expected = width as usize * height as usize;
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: values.len(),
            });
        }
        Ok(DepthFrame {
            width,
            height,
            values,
        })
    }

    pub fn filled(width: u32, height: u32, value: u16) -> Self {
        DepthFrame {
            width,
            height,
            values: vec![value; width as usize * height as usize],
        }
    }

    #[inline]
    pub fn get(&self, u: u32, v: u32) -> u16 {
        self.values[v as usize * self.width as usize + u as usize]
    }
}

/// Decodes a 16-bit single-channel PNG.
pub fn decode_depth_png(bytes: &[u8], context: &str) -> Result<DepthFrame> {
    let decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    let mut reader = decoder.read_info().map_err(|e| Error::parse(context, e))?;
    let (color, depth) = {
        let info = reader.info();
        (info.color_type, info.bit_depth)
    };
    if depth != png::BitDepth::Sixteen {
        return Err(Error::parse(
            context,
            format!("bit depth must be 16, found {}", depth as u8),
        ));
    }
    if color != png::ColorType::Grayscale {
        return Err(Error::parse(
            context,
            format!("expected single-channel grayscale, found {color:?}"),
        ));
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::parse(context, "image too large"))?;
    let mut buf = vec![0u8; size];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::parse(context, e))?;
    let values = buf[..info.buffer_size()]
        .chunks_exact(2)
        .map(|b| u16::from_be_bytes([b[0], b[1]]))
        .collect();
    DepthFrame::new(info.width, info.height, values)
}

/// Encodes with fixed compression and filter settings so identical frames
/// always produce identical bytes.
pub fn encode_depth_png(frame: &DepthFrame) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, frame.width, frame.height);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(png::BitDepth::Sixteen);
        enc.set_compression(png::Compression::Balanced);
        enc.set_filter(png::Filter::Up);
        let mut writer = enc
            .write_header()
            .map_err(|e| Error::parse("depth encoder", e))?;
        let data: Vec<u8> = frame.values.iter().flat_map(|v| v.to_be_bytes()).collect();
        writer
            .write_image_data(&data)
            .map_err(|e| Error::parse("depth encoder", e))?;
        writer
            .finish()
            .map_err(|e| Error::parse("depth encoder", e))?;
    }
    Ok(out)
}

pub fn load_depth(path: &Path, intrinsics: &CameraIntrinsics) -> Result<DepthFrame> {
    let bytes = read_file(path)?;
    let frame = decode_depth_png(&bytes, &path.display().to_string())?;
    if (frame.width, frame.height) != (intrinsics.width, intrinsics.height) {
        return Err(Error::DimensionMismatch {
            expected: (intrinsics.width, intrinsics.height),
            found: (frame.width, frame.height),
        });
    }
    Ok(frame)
}

pub fn save_depth(path: &Path, frame: &DepthFrame) -> Result<()> {
    write_atomic(path, &encode_depth_png(frame)?)
}
