use crate::frame_io::BitMask;

/// Dilates (`delta_px > 0`) or erodes (`delta_px < 0`) with a
/// `(2|delta|+1)²` square structuring element. The window is clipped at the
/// image border, so pixels outside the image neither add to a dilation nor
/// veto an erosion.
pub fn perturb_mask(mask: &BitMask, delta_px: i32) -> BitMask {
    if delta_px == 0 {
        return mask.clone();
    }
    let radius = delta_px.unsigned_abs() as usize;
    let dilate = delta_px > 0;
    let (w, h) = (mask.width as usize, mask.height as usize);

    let rows = filter_lines(&mask.bits, w, h, 1, w, radius, dilate);
    let bits = filter_lines(&rows, h, w, w, 1, radius, dilate);
    BitMask {
        width: mask.width,
        height: mask.height,
        bits,
    }
}

/// Applies a 1-D window filter along `count` lines of `len` pixels.
/// `step` is the stride between neighbours on a line and `line_stride` the
/// stride between line starts.
fn filter_lines(
    src: &[bool],
    len: usize,
    count: usize,
    step: usize,
    line_stride: usize,
    radius: usize,
    dilate: bool,
) -> Vec<bool> {
    let mut out = vec![false; src.len()];
    let mut prefix = vec![0usize; len + 1];
    for line in 0..count {
        let base = line * line_stride;
        for i in 0..len {
            prefix[i + 1] = prefix[i] + src[base + i * step] as usize;
        }
        for i in 0..len {
            let lo = i.saturating_sub(radius);
            let hi = (i + radius + 1).min(len);
            let set = prefix[hi] - prefix[lo];
            out[base + i * step] = if dilate { set > 0 } else { set == hi - lo };
        }
    }
    out
}
