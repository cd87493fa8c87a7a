//! Display models: waveform envelopes, view ranges, spectrogram cropping,
//! display normalization and turbo rasterization.

mod colormap;
mod range;
mod raster;
mod waveform;

use thiserror::Error;

use crate::dsp::{SpectrogramMatrix, SpectrogramMeta};
use crate::scalar::Sample;

pub use colormap::{turbo_color, TURBO_SRGB};
pub use range::{Interval, ViewRange};
pub use raster::{
    normalize_for_display, rasterize_spectrogram, rasterize_waveform, PixelGrid, Rgb,
    WAVE_BACKGROUND, WAVE_FOREGROUND,
};
pub use waveform::{decimate_minmax, decimate_range, Bucket, WaveformSummary};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VizError {
    #[error("clip has no samples")]
    EmptyClip,
    #[error("bucket count {0} must be at least 1")]
    InvalidBucketCount(usize),
    #[error("empty result: {0}")]
    EmptyResult(String),
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("invalid raster size {width}x{height}")]
    InvalidDimensions { width: usize, height: usize },
    #[error("malformed buffer: {0}")]
    MalformedBuffer(String),
}

impl VizError {
    pub fn kind(&self) -> &'static str {
        match self {
            VizError::EmptyClip => "EmptyClip",
            VizError::InvalidBucketCount(_) => "InvalidBucketCount",
            VizError::EmptyResult(_) => "EmptyResult",
            VizError::InvalidRange(_) => "InvalidRange",
            VizError::InvalidDimensions { .. } => "InvalidDimensions",
            VizError::MalformedBuffer(_) => "MalformedBuffer",
        }
    }
}

/// Keep the frames whose start time lies in `[t0, t1)` and the bins whose
/// frequency lies in `[f0, f1]`.
pub fn crop_to_range<T: Sample>(
    matrix: &SpectrogramMatrix<T>,
    range: &ViewRange,
) -> Result<SpectrogramMatrix<T>, VizError> {
    let meta = &matrix.meta;
    let keep_frame = |j: usize| {
        let t = meta.frame_time(j);
        t >= range.time.lo && t < range.time.hi
    };
    let keep_bin = |k: usize| range.frequency.contains(meta.bin_frequency(k));

    // Both axes are monotone, so the survivors are contiguous runs.
    let frames: Vec<usize> = (0..meta.frames).filter(|&j| keep_frame(j)).collect();
    let bins: Vec<usize> = (0..meta.bins).filter(|&k| keep_bin(k)).collect();
    let (Some(&f0), Some(&k0)) = (frames.first(), bins.first()) else {
        return Err(VizError::EmptyResult(
            "no spectrogram cells inside the view range".into(),
        ));
    };
    let (nf, nb) = (frames.len(), bins.len());

    let mut values = Vec::with_capacity(nf * nb);
    for j in f0..f0 + nf {
        values.extend_from_slice(&matrix.frame(j)[k0..k0 + nb]);
    }
    Ok(SpectrogramMatrix {
        meta: SpectrogramMeta {
            frames: nf,
            bins: nb,
            frame_offset: meta.frame_offset + f0,
            bin_offset: meta.bin_offset + k0,
            ..*meta
        },
        values,
    })
}
