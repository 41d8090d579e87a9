use crate::error::{Error, Result};

/// Row-major binary mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitMask {
    pub width: u32,
    pub height: u32,
    pub bits: Vec<bool>,
}

impl BitMask {
    pub fn new(width: u32, height: u32, bits: Vec<bool>) -> Result<Self> {
        let expected = width as usize * height as usize;
        if bits.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: bits.len(),
            });
        }
        Ok(BitMask {
            width,
            height,
            bits,
        })
    }

    pub fn empty(width: u32, height: u32) -> Self {
        BitMask {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
        }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width as usize * height as usize);
        for v in 0..height {
            for u in 0..width {
                bits.push(f(u, v));
            }
        }
        BitMask {
            width,
            height,
            bits,
        }
    }

    #[inline]
    pub fn get(&self, u: u32, v: u32) -> bool {
        self.bits[v as usize * self.width as usize + u as usize]
    }

    #[inline]
    pub fn set(&mut self, u: u32, v: u32, value: bool) {
        let w = self.width as usize;
        self.bits[v as usize * w + u as usize] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    /// Pixel coordinates of set bits in row-major order.
    pub fn iter_set(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.width as usize;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| ((i % w) as u32, (i / w) as u32))
    }
}

/// Expands alternating run lengths (zeros first) into a row-major mask.
pub fn decode_rle(counts: &[u32], width: u32, height: u32) -> Result<BitMask> {
    let expected = width as usize * height as usize;
    let total: usize = counts.iter().map(|&c| c as usize).sum();
    if total != expected {
        return Err(Error::LengthMismatch {
            expected,
            found: total,
        });
    }
    let mut bits = Vec::with_capacity(expected);
    let mut value = false;
    for &c in counts {
        bits.extend(std::iter::repeat_n(value, c as usize));
        value = !value;
    }
    Ok(BitMask {
        width,
        height,
        bits,
    })
}

/// Canonical run-length encoding: the first count is the leading zero run
/// (possibly 0) and no later run is empty.
pub fn encode_rle(mask: &BitMask) -> Vec<u32> {
    let mut counts = Vec::new();
    let mut current = false;
    let mut run = 0u32;
    for &b in &mask.bits {
        if b != current {
            counts.push(run);
            run = 0;
            current = b;
        }
        run += 1;
    }
    if run > 0 || counts.is_empty() {
        counts.push(run);
    }
    counts
}
