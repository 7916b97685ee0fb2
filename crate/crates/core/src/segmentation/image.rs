use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Rgb = [u8; 3];

/// Row-major 8-bit RGB raster.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RasterImage {
    width: usize,
    height: usize,
    pixels: Vec<Rgb>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, pixels: Vec<Rgb>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Validation(format!("image must be non-empty, got {width}x{height}")));
        }
        if pixels.len() != width * height {
            return Err(Error::Validation(format!(
                "{width}x{height} image needs {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, rgb: Rgb) -> Result<Self> {
        Self::new(width, height, vec![rgb; width * height])
    }

    pub fn black(width: usize, height: usize) -> Result<Self> {
        Self::filled(width, height, [0, 0, 0])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, rgb: Rgb) {
        self.pixels[y * self.width + x] = rgb;
    }

    /// Flattens to `[r, g, b, r, g, b, …]`.
    pub fn to_rgb_bytes(&self) -> Vec<u8> {
        self.pixels.iter().flatten().copied().collect()
    }

    pub fn from_rgb_bytes(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != width * height * 3 {
            return Err(Error::Validation(format!(
                "{width}x{height} RGB image needs {} bytes, got {}",
                width * height * 3,
                bytes.len()
            )));
        }
        Self::new(width, height, bytes.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect())
    }
}

/// Rec. 601 luma in `[0, 1]`.
pub fn brightness<T: Scalar>(rgb: Rgb) -> T {
    T::lit((0.299 * rgb[0] as f64 + 0.587 * rgb[1] as f64 + 0.114 * rgb[2] as f64) / 255.0)
}
