//! Binary, soft and 8-bit masks on a row-major grid.

use alloc::format;
use alloc::vec::Vec;

use crate::math::floor;
use crate::{Error, Result};

/// Inclusive foreground bounding box in grid coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundingBox {
    pub top: usize,
    pub left: usize,
    pub bottom: usize,
    pub right: usize,
}

impl BoundingBox {
    pub fn width(&self) -> usize {
        self.right - self.left + 1
    }

    pub fn height(&self) -> usize {
        self.bottom - self.top + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    height: usize,
    width: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(height: usize, width: usize, bits: Vec<bool>) -> Result<Self> {
        check_dims(height, width)?;
        if bits.len() != height * width {
            return Err(Error::Shape(format!(
                "mask {height}x{width} needs {} bits, got {}",
                height * width,
                bits.len()
            )));
        }
        Ok(Self { height, width, bits })
    }

    pub fn filled(height: usize, width: usize, value: bool) -> Result<Self> {
        check_dims(height, width)?;
        Ok(Self { height, width, bits: alloc::vec![value; height * width] })
    }

    pub fn from_fn<F: FnMut(usize, usize) -> bool>(height: usize, width: usize, mut f: F) -> Result<Self> {
        check_dims(height, width)?;
        let mut bits = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                bits.push(f(r, c));
            }
        }
        Ok(Self { height, width, bits })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.width + col]
    }

    /// Foreground pixel count.
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// True when no pixel is foreground.
    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn complement(&self) -> Self {
        Self { height: self.height, width: self.width, bits: self.bits.iter().map(|&b| !b).collect() }
    }

    pub fn bounding_box(&self) -> Option<BoundingBox> {
        let mut bbox: Option<BoundingBox> = None;
        for (i, _) in self.bits.iter().enumerate().filter(|(_, &b)| b) {
            let (r, c) = (i / self.width, i % self.width);
            bbox = Some(match bbox {
                None => BoundingBox { top: r, left: c, bottom: r, right: c },
                Some(b) => BoundingBox {
                    top: b.top.min(r),
                    left: b.left.min(c),
                    bottom: b.bottom.max(r),
                    right: b.right.max(c),
                },
            });
        }
        bbox
    }

    /// Pixels set in both masks. Panics on a dimension mismatch.
    pub fn intersection_count(&self, other: &Self) -> usize {
        assert_eq!(self.dims(), other.dims());
        self.bits.iter().zip(&other.bits).filter(|(&a, &b)| a && b).count()
    }

    /// Pixels set in either mask. Panics on a dimension mismatch.
    pub fn union_count(&self, other: &Self) -> usize {
        assert_eq!(self.dims(), other.dims());
        self.bits.iter().zip(&other.bits).filter(|(&a, &b)| a || b).count()
    }

    /// 8-bit rendering: foreground 255, background 0.
    pub fn to_gray(&self) -> GrayMask {
        GrayMask {
            height: self.height,
            width: self.width,
            values: self.bits.iter().map(|&b| if b { 255 } else { 0 }).collect(),
        }
    }
}

/// Real-valued mask with every value in `[0, 1]`, e.g. a sigmoid output.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftMask {
    height: usize,
    width: usize,
    values: Vec<f64>,
}

impl SoftMask {
    pub fn new(height: usize, width: usize, values: Vec<f64>) -> Result<Self> {
        check_dims(height, width)?;
        if values.len() != height * width {
            return Err(Error::Shape(format!(
                "soft mask {height}x{width} needs {} values, got {}",
                height * width,
                values.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::OutOfRange { index, what: "soft mask value" });
        }
        Ok(Self { height, width, values })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Foreground where the value is strictly greater than `threshold`.
    pub fn binarize(&self, threshold: f64) -> BinaryMask {
        BinaryMask {
            height: self.height,
            width: self.width,
            bits: self.values.iter().map(|&v| v > threshold).collect(),
        }
    }

    /// Maps each value to `round(v·255)` with halves rounded up.
    pub fn quantize(&self) -> GrayMask {
        GrayMask {
            height: self.height,
            width: self.width,
            values: self.values.iter().map(|&v| quantize_unit(v)).collect(),
        }
    }
}

pub(crate) fn quantize_unit(v: f64) -> u8 {
    floor(v * 255.0 + 0.5).clamp(0.0, 255.0) as u8
}

/// 8-bit single-channel mask, the on-disk form of predictions and labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayMask {
    height: usize,
    width: usize,
    values: Vec<u8>,
}

impl GrayMask {
    pub fn new(height: usize, width: usize, values: Vec<u8>) -> Result<Self> {
        check_dims(height, width)?;
        if values.len() != height * width {
            return Err(Error::Shape(format!(
                "gray mask {height}x{width} needs {} values, got {}",
                height * width,
                values.len()
            )));
        }
        Ok(Self { height, width, values })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    /// Foreground where the value is strictly greater than `t`.
    pub fn threshold(&self, t: u8) -> BinaryMask {
        BinaryMask {
            height: self.height,
            width: self.width,
            bits: self.values.iter().map(|&v| v > t).collect(),
        }
    }
}

fn check_dims(height: usize, width: usize) -> Result<()> {
    if height == 0 || width == 0 {
        return Err(Error::Shape(format!("mask dimensions must be positive, got {height}x{width}")));
    }
    Ok(())
}

/// Nearest-neighbour resampling: target pixel `(i, j)` reads source pixel
/// `(⌊i·h/H⌋, ⌊j·w/W⌋)`.
pub fn resize_mask_nearest(mask: &BinaryMask, target_h: usize, target_w: usize) -> Result<BinaryMask> {
    check_dims(target_h, target_w)?;
    let (h, w) = mask.dims();
    BinaryMask::from_fn(target_h, target_w, |i, j| mask.get(i * h / target_h, j * w / target_w))
}

/// Nearest-neighbour resampling of an 8-bit mask, same index map as
/// [`resize_mask_nearest`].
pub fn resize_gray_nearest(mask: &GrayMask, target_h: usize, target_w: usize) -> Result<GrayMask> {
    check_dims(target_h, target_w)?;
    let (h, w) = mask.dims();
    let src = mask.values();
    let mut values = Vec::with_capacity(target_h * target_w);
    for i in 0..target_h {
        let row = i * h / target_h * w;
        for j in 0..target_w {
            values.push(src[row + j * w / target_w]);
        }
    }
    GrayMask::new(target_h, target_w, values)
}
