use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Dense per-cell features laid out `(height, width, channels)` in row-major
/// order. Channel-first data must be transposed before construction.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f64>,
}

impl FeatureMap {
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 || channels == 0 {
            return Err(Error::Shape(format!(
                "feature map dimensions must be positive, got ({height}, {width}, {channels})"
            )));
        }
        let expected = height * width * channels;
        if data.len() != expected {
            return Err(Error::Shape(format!(
                "feature map ({height}, {width}, {channels}) needs {expected} values, got {}",
                data.len()
            )));
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { height, width, channels, data })
    }

    /// Builds a map by evaluating `f(row, col)` for every cell.
    pub fn from_fn<F>(height: usize, width: usize, channels: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Vec<f64>,
    {
        let mut data = Vec::with_capacity(height * width * channels);
        for r in 0..height {
            for c in 0..width {
                let v = f(r, c);
                if v.len() != channels {
                    return Err(Error::Shape(format!(
                        "cell ({r}, {c}) has {} channels, expected {channels}",
                        v.len()
                    )));
                }
                data.extend_from_slice(&v);
            }
        }
        Self::new(height, width, channels, data)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Number of grid cells, `h·w`.
    pub fn cells(&self) -> usize {
        self.height * self.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Feature vector of the cell with flat row-major index `i`.
    pub fn cell(&self, i: usize) -> &[f64] {
        &self.data[i * self.channels..(i + 1) * self.channels]
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }
}
