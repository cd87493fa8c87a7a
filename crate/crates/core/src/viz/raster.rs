use rayon::prelude::*;

use crate::dsp::SpectrogramMatrix;
use crate::scalar::Sample;

use super::{turbo_color, ViewRange, VizError, WaveformSummary};

pub type Rgb = [u8; 3];

/// Row-major 8-bit RGB raster. Row 0 is the top of the image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelGrid {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<Rgb>,
}

impl PixelGrid {
    pub fn filled(width: usize, height: usize, color: Rgb) -> Self {
        Self {
            width,
            height,
            pixels: vec![color; width * height],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, c: Rgb) {
        self.pixels[y * self.width + x] = c;
    }

    /// Flattened `r g b r g b ...` bytes.
    pub fn rgb_bytes(&self) -> Vec<u8> {
        self.pixels.iter().flatten().copied().collect()
    }

    pub fn from_rgb_bytes(width: usize, height: usize, bytes: &[u8]) -> Result<Self, VizError> {
        if width.checked_mul(height).and_then(|n| n.checked_mul(3)) != Some(bytes.len()) {
            return Err(VizError::MalformedBuffer(format!(
                "{} bytes cannot hold a {width}x{height} RGB grid",
                bytes.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels: bytes.chunks_exact(3).map(|p| [p[0], p[1], p[2]]).collect(),
        })
    }
}

/// Min-max normalize to [0, 1]. A constant matrix maps to all zeros.
pub fn normalize_for_display<T: Sample>(matrix: &SpectrogramMatrix<T>) -> Vec<f64> {
    let (lo, hi) = matrix
        .values
        .iter()
        .map(|v| v.as_f64())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    let span = hi - lo;
    if span.is_nan() || span <= 0.0 {
        return vec![0.0; matrix.values.len()];
    }
    matrix
        .values
        .iter()
        .map(|v| (v.as_f64() - lo) / span)
        .collect()
}

fn check_dims(width: usize, height: usize) -> Result<(), VizError> {
    if width == 0 || height == 0 {
        return Err(VizError::InvalidDimensions { width, height });
    }
    Ok(())
}

/// Color a spectrogram with turbo and resample it nearest-neighbor onto a
/// `width x height` raster. Time runs left to right and frequency bottom to
/// top, so row 0 holds the highest retained bin.
pub fn rasterize_spectrogram<T: Sample>(
    matrix: &SpectrogramMatrix<T>,
    width: usize,
    height: usize,
) -> Result<PixelGrid, VizError> {
    check_dims(width, height)?;
    if matrix.is_empty() {
        return Err(VizError::EmptyResult("spectrogram has no cells".into()));
    }
    let (frames, bins) = (matrix.frames(), matrix.bins());
    let colors: Vec<Rgb> = normalize_for_display(matrix)
        .into_iter()
        .map(turbo_color)
        .collect();
    let columns: Vec<usize> = (0..width).map(|x| x * frames / width).collect();

    let mut pixels = vec![[0u8; 3]; width * height];
    pixels
        .par_chunks_mut(width)
        .enumerate()
        .for_each(|(y, row)| {
            let bin = bins - 1 - y * bins / height;
            for (px, &frame) in row.iter_mut().zip(&columns) {
                *px = colors[frame * bins + bin];
            }
        });
    Ok(PixelGrid {
        width,
        height,
        pixels,
    })
}

pub const WAVE_BACKGROUND: Rgb = [255, 255, 255];
pub const WAVE_FOREGROUND: Rgb = [31, 119, 180];

/// Draw a waveform summary as one min-max column per pixel over the time
/// and amplitude window of `range`.
pub fn rasterize_waveform<T: Sample>(
    summary: &WaveformSummary<T>,
    range: &ViewRange,
    width: usize,
    height: usize,
) -> Result<PixelGrid, VizError> {
    check_dims(width, height)?;
    let mut grid = PixelGrid::filled(width, height, WAVE_BACKGROUND);
    let (t0, t1) = (range.time.lo, range.time.hi);
    let (a0, a1) = (range.amplitude.lo, range.amplitude.hi);
    let x_of = |t: f64| (t - t0) / (t1 - t0) * width as f64;
    let y_of = |a: f64| (a1 - a) / (a1 - a0) * height as f64;

    let mut drawn = false;
    for (i, b) in summary.buckets.iter().enumerate() {
        let (s, e) = summary.bucket_span(i);
        if e <= t0 || s >= t1 {
            continue;
        }
        drawn = true;
        let x0 = x_of(s).floor().max(0.0) as usize;
        let x1 = (x_of(e).ceil().min(width as f64) as usize)
            .max(x0 + 1)
            .min(width);
        let top = y_of(b.max.as_f64()).floor();
        let bottom = y_of(b.min.as_f64()).floor();
        if bottom < 0.0 || top >= height as f64 {
            continue;
        }
        let y0 = top.max(0.0) as usize;
        let y1 = (bottom.min(height as f64 - 1.0)) as usize;
        for x in x0..x1 {
            for y in y0..=y1 {
                grid.set(x, y, WAVE_FOREGROUND);
            }
        }
    }
    if !drawn {
        return Err(VizError::EmptyResult(
            "no buckets inside the time range".into(),
        ));
    }
    Ok(grid)
}
