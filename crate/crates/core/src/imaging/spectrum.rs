use alloc::vec::Vec;

use super::{ComplexGrid, GrayGrid, ImagingError};

/// Variance below this is treated as a constant vector.
const VARIANCE_FLOOR: f64 = 1e-12;

/// Standardised, pooled log-amplitude spectrum of one image.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumFeature {
    grid_size: usize,
    values: Vec<f64>,
}

impl SpectrumFeature {
    /// Wraps raw values; the length must be a perfect square.
    pub fn from_values(values: Vec<f64>) -> Option<Self> {
        let side = libm::sqrt(values.len() as f64) as usize;
        (side * side == values.len() && side > 0).then_some(Self {
            grid_size: side,
            values,
        })
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

pub fn amplitude(c: &ComplexGrid) -> GrayGrid {
    let data = c.data().iter().map(|z| z.norm()).collect();
    GrayGrid::new(c.width(), c.height(), data).expect("dimensions come from a valid grid")
}

/// Circularly shifts the grid so the zero-frequency bin sits at
/// `(width / 2, height / 2)`.
pub fn center_shift(g: &GrayGrid) -> GrayGrid {
    let (w, h) = (g.width(), g.height());
    let mut out = alloc::vec![0.0; w * h];
    for y in 0..h {
        let ty = (y + h / 2) % h;
        for x in 0..w {
            out[ty * w + (x + w / 2) % w] = g.get(x, y);
        }
    }
    GrayGrid::new(w, h, out).expect("same dimensions")
}

/// Feature adapter between an amplitude spectrum and the discriminator:
/// `log1p` per bin, center shift, average pool to `grid_size`x`grid_size`,
/// then standardise within the vector.
///
/// Pool cell `i` along an axis of length `n` covers
/// `[floor(i n / g), ceil((i + 1) n / g))`, which reduces to exact blocks when
/// `g` divides `n` and stays non-empty when `n < g`.
pub fn spectrum_features(amp: &GrayGrid, grid_size: usize) -> Result<SpectrumFeature, ImagingError> {
    if grid_size == 0 {
        return Err(ImagingError::ZeroDimension {
            width: 0,
            height: 0,
        });
    }
    let logged = GrayGrid::new(
        amp.width(),
        amp.height(),
        amp.data().iter().map(|&a| libm::log1p(a)).collect(),
    )?;
    let shifted = center_shift(&logged);

    let span = |i: usize, n: usize| {
        let lo = i * n / grid_size;
        let hi = ((i + 1) * n).div_ceil(grid_size).min(n);
        lo..hi.max(lo + 1)
    };
    let mut values = Vec::with_capacity(grid_size * grid_size);
    for gy in 0..grid_size {
        let rows = span(gy, shifted.height());
        for gx in 0..grid_size {
            let cols = span(gx, shifted.width());
            let mut sum = 0.0;
            for y in rows.clone() {
                for x in cols.clone() {
                    sum += shifted.get(x, y);
                }
            }
            values.push(sum / (rows.len() * cols.len()) as f64);
        }
    }

    standardize(&mut values);
    Ok(SpectrumFeature { grid_size, values })
}

fn standardize(values: &mut [f64]) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if var < VARIANCE_FLOOR {
        values.iter_mut().for_each(|v| *v = 0.0);
    } else {
        let inv = 1.0 / libm::sqrt(var);
        values.iter_mut().for_each(|v| *v = (*v - mean) * inv);
    }
}
