//! Raster images and the Fourier amplitude pipeline that feeds the domain
//! discriminator.
//!
//! The pipeline is `RasterImage -> GrayGrid -> resize -> dft2 -> amplitude
//! -> spectrum_features`. [`spectrum_signature`] runs it end to end.

mod fft;
pub mod netpbm;
mod spectrum;

use alloc::vec;
use alloc::vec::Vec;

pub use fft::{dft2, Complex, ComplexGrid, Fft};
pub use spectrum::{amplitude, center_shift, spectrum_features, SpectrumFeature};

/// Rec.601 luma weights.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

/// Side length images are resized to before the transform.
pub const DEFAULT_SIDE: usize = 224;

/// Side length of the pooled spectrum.
pub const DEFAULT_GRID_SIZE: usize = 32;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ImagingError {
    #[error("image dimensions must be non-zero, got {width}x{height}")]
    ZeroDimension { width: usize, height: usize },
    #[error("expected {expected} samples, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("sample {index} = {value} is outside [0, 1]")]
    OutOfRange { index: usize, value: f64 },
}

/// Interleaved RGB image with samples normalised to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl RasterImage {
    pub const CHANNELS: usize = 3;

    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self, ImagingError> {
        if width == 0 || height == 0 {
            return Err(ImagingError::ZeroDimension { width, height });
        }
        let expected = width * height * Self::CHANNELS;
        if data.len() != expected {
            return Err(ImagingError::LengthMismatch {
                expected,
                actual: data.len(),
            });
        }
        if let Some((index, &value)) = data
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(ImagingError::OutOfRange { index, value });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds an image from a per-pixel closure returning `[r, g, b]`.
    /// Values are clamped into `[0, 1]`.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [f64; 3],
    ) -> Result<Self, ImagingError> {
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend(f(x, y).iter().map(|v| v.clamp(0.0, 1.0)));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }
}

/// Row-major grid of real scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayGrid {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayGrid {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self, ImagingError> {
        if width == 0 || height == 0 {
            return Err(ImagingError::ZeroDimension { width, height });
        }
        if data.len() != width * height {
            return Err(ImagingError::LengthMismatch {
                expected: width * height,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self, ImagingError> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self, ImagingError> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }
}

pub fn to_grayscale(img: &RasterImage) -> GrayGrid {
    let [wr, wg, wb] = LUMA_WEIGHTS;
    let data = img
        .data
        .chunks_exact(3)
        .map(|p| wr * p[0] + wg * p[1] + wb * p[2])
        .collect();
    GrayGrid {
        width: img.width,
        height: img.height,
        data,
    }
}

/// Bilinear resize with corner-aligned sampling: output corners land exactly
/// on input corners. A target side of 1 samples the first row/column.
pub fn resize_bilinear(g: &GrayGrid, height: usize, width: usize) -> Result<GrayGrid, ImagingError> {
    if height == 0 || width == 0 {
        return Err(ImagingError::ZeroDimension { width, height });
    }
    if height == g.height && width == g.width {
        return Ok(g.clone());
    }
    let scale = |out: usize, inp: usize| {
        if out > 1 {
            (inp - 1) as f64 / (out - 1) as f64
        } else {
            0.0
        }
    };
    let sy = scale(height, g.height);
    let sx = scale(width, g.width);
    let mut data = Vec::with_capacity(height * width);
    for oy in 0..height {
        let fy = oy as f64 * sy;
        let y0 = (libm::floor(fy) as usize).min(g.height - 1);
        let y1 = (y0 + 1).min(g.height - 1);
        let ty = fy - y0 as f64;
        for ox in 0..width {
            let fx = ox as f64 * sx;
            let x0 = (libm::floor(fx) as usize).min(g.width - 1);
            let x1 = (x0 + 1).min(g.width - 1);
            let tx = fx - x0 as f64;
            let top = g.get(x0, y0) * (1.0 - tx) + g.get(x1, y0) * tx;
            let bottom = g.get(x0, y1) * (1.0 - tx) + g.get(x1, y1) * tx;
            data.push(top * (1.0 - ty) + bottom * ty);
        }
    }
    GrayGrid::new(width, height, data)
}

/// Full feature pipeline: grayscale, resize to `side`x`side`, DFT, amplitude,
/// then the pooled log-amplitude feature of `grid_size`x`grid_size`.
pub fn spectrum_signature(
    img: &RasterImage,
    side: usize,
    grid_size: usize,
) -> Result<SpectrumFeature, ImagingError> {
    let gray = resize_bilinear(&to_grayscale(img), side, side)?;
    let amp = amplitude(&dft2(&gray));
    spectrum_features(&amp, grid_size)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solid(w: usize, h: usize, rgb: [f64; 3]) -> RasterImage {
        RasterImage::from_fn(w, h, |_, _| rgb).unwrap()
    }

    #[test]
    fn grayscale_weights() {
        let white = to_grayscale(&solid(3, 2, [1.0, 1.0, 1.0]));
        assert!(white.data().iter().all(|v| (v - 1.0).abs() < 1e-15));
        let red = to_grayscale(&solid(3, 2, [1.0, 0.0, 0.0]));
        assert!(red.data().iter().all(|&v| v == 0.299));
        let blue = to_grayscale(&solid(3, 2, [0.0, 0.0, 1.0]));
        assert!(blue.data().iter().all(|&v| v == 0.114));
    }

    #[test]
    fn raster_rejects_bad_buffers() {
        assert!(matches!(
            RasterImage::new(2, 2, vec![0.0; 11]),
            Err(ImagingError::LengthMismatch { .. })
        ));
        assert!(matches!(
            RasterImage::new(1, 1, vec![0.0, 1.5, 0.0]),
            Err(ImagingError::OutOfRange { index: 1, .. })
        ));
        assert!(RasterImage::new(0, 1, vec![]).is_err());
    }

    #[test]
    fn resize_constant_and_identity() {
        let c = GrayGrid::filled(5, 3, 0.37).unwrap();
        let r = resize_bilinear(&c, 7, 11).unwrap();
        assert_eq!((r.width(), r.height()), (11, 7));
        assert!(r.data().iter().all(|v| (v - 0.37).abs() < 1e-15));

        let g = GrayGrid::from_fn(4, 3, |x, y| (x * 3 + y) as f64).unwrap();
        assert_eq!(resize_bilinear(&g, 3, 4).unwrap(), g);
    }

    #[test]
    fn resize_two_by_two_to_two_by_three() {
        // [0 1; 0 1] widened to three columns puts the middle column at 0.5.
        let g = GrayGrid::new(2, 2, vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        let r = resize_bilinear(&g, 2, 3).unwrap();
        assert_eq!(r.data(), &[0.0, 0.5, 1.0, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn resize_rejects_zero_target() {
        let g = GrayGrid::filled(2, 2, 0.0).unwrap();
        assert!(resize_bilinear(&g, 0, 3).is_err());
        assert!(resize_bilinear(&g, 3, 0).is_err());
    }

    #[test]
    fn signature_has_requested_length() {
        let img = RasterImage::from_fn(9, 13, |x, y| {
            let v = ((x * 7 + y * 3) % 5) as f64 / 4.0;
            [v, 1.0 - v, 0.5]
        })
        .unwrap();
        let f = spectrum_signature(&img, 24, 8).unwrap();
        assert_eq!(f.values().len(), 64);
        assert_eq!(f.grid_size(), 8);
    }
}
