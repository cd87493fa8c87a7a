use serde::Serialize;

use crate::scalar::Sample;

use super::DspError;

const MAGIC: &[u8; 4] = b"WSPM";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 44;

/// Axis metadata of a spectrogram, independent of its values.
///
/// Frame and bin positions are kept as integer offsets into the uncropped
/// STFT so that cropping never accumulates rounding in the time or frequency
/// origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrogramMeta {
    pub frames: usize,
    pub bins: usize,
    pub sample_rate: u32,
    pub window_size: usize,
    pub hop_size: usize,
    /// Start time of STFT frame 0 in the source recording.
    pub origin_time: f64,
    pub frame_offset: usize,
    pub bin_offset: usize,
}

impl SpectrogramMeta {
    /// Seconds between consecutive frames.
    pub fn time_step(&self) -> f64 {
        self.hop_size as f64 / self.sample_rate as f64
    }

    /// Hz between consecutive bins.
    pub fn freq_step(&self) -> f64 {
        self.sample_rate as f64 / self.window_size as f64
    }

    /// Start time of local frame `j`.
    pub fn frame_time(&self, j: usize) -> f64 {
        self.origin_time + (self.frame_offset + j) as f64 * self.time_step()
    }

    /// Centre frequency of local bin `k`.
    pub fn bin_frequency(&self, k: usize) -> f64 {
        (self.bin_offset + k) as f64 * self.freq_step()
    }

    pub fn start_time(&self) -> f64 {
        self.frame_time(0)
    }

    /// Start time of the frame after the last one.
    pub fn end_time(&self) -> f64 {
        self.frame_time(self.frames)
    }

    pub fn min_frequency(&self) -> f64 {
        self.bin_frequency(0)
    }

    pub fn max_frequency(&self) -> f64 {
        self.bin_frequency(self.bins.saturating_sub(1))
    }

    pub fn nyquist(&self) -> f64 {
        self.sample_rate as f64 / 2.0
    }
}

/// Frames x bins grid of log-compressed magnitudes, stored frame-major:
/// `values[frame * bins + bin]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrogramMatrix<T> {
    pub meta: SpectrogramMeta,
    pub values: Vec<T>,
}

impl<T: Sample> SpectrogramMatrix<T> {
    pub fn frames(&self) -> usize {
        self.meta.frames
    }

    pub fn bins(&self) -> usize {
        self.meta.bins
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, frame: usize, bin: usize) -> T {
        self.values[frame * self.meta.bins + bin]
    }

    pub fn frame(&self, frame: usize) -> &[T] {
        let b = self.meta.bins;
        &self.values[frame * b..(frame + 1) * b]
    }

    /// Serialize as a 44-byte little-endian header followed by the values as
    /// frame-major `f32`.
    ///
    /// ```text
    /// 0  "WSPM"        4  version u32     8  frames u32     12 bins u32
    /// 16 sample_rate   20 window_size     24 hop_size       28 frame_offset
    /// 32 bin_offset    36 origin_time f64 44 values...
    /// ```
    pub fn to_bytes(&self) -> Vec<u8> {
        let m = &self.meta;
        let mut out = Vec::with_capacity(HEADER_LEN + self.values.len() * 4);
        out.extend_from_slice(MAGIC);
        for v in [
            VERSION,
            m.frames as u32,
            m.bins as u32,
            m.sample_rate,
            m.window_size as u32,
            m.hop_size as u32,
            m.frame_offset as u32,
            m.bin_offset as u32,
        ] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&m.origin_time.to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&(v.as_f64() as f32).to_le_bytes());
        }
        out
    }
}

impl SpectrogramMatrix<f32> {
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DspError> {
        let bad = |m: &str| DspError::MalformedBuffer(m.to_string());
        if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
            return Err(bad("missing WSPM header"));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
        if word(4) != VERSION {
            return Err(bad("unsupported version"));
        }
        let frames = word(8) as usize;
        let bins = word(12) as usize;
        let meta = SpectrogramMeta {
            frames,
            bins,
            sample_rate: word(16),
            window_size: word(20) as usize,
            hop_size: word(24) as usize,
            frame_offset: word(28) as usize,
            bin_offset: word(32) as usize,
            origin_time: f64::from_le_bytes(bytes[36..44].try_into().unwrap()),
        };
        let body = &bytes[HEADER_LEN..];
        if frames.checked_mul(bins).and_then(|n| n.checked_mul(4)) != Some(body.len()) {
            return Err(bad("value count does not match frames x bins"));
        }
        let values = body
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
            .collect();
        Ok(Self { meta, values })
    }
}
