//! Window functions, radix-2 FFT, STFT and the log-magnitude spectrogram.

mod fft;
mod matrix;
mod stft;
mod window;

use thiserror::Error;

pub use fft::{fft, FftPlan};
pub use matrix::{SpectrogramMatrix, SpectrogramMeta};
pub use stft::{frame_count, log_compress, spectrogram, stft, Spectrum};
pub use window::{hann_window, WindowShape, WindowSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DspError {
    #[error("invalid size {0}: expected a power of two")]
    InvalidSize(usize),
    #[error("invalid window spec: {0}")]
    InvalidWindowSpec(String),
    #[error("clip has no samples")]
    EmptyClip,
    #[error("magnitude {0} is negative")]
    NegativeMagnitude(f64),
    #[error("malformed spectrogram buffer: {0}")]
    MalformedBuffer(String),
}

impl DspError {
    pub fn kind(&self) -> &'static str {
        match self {
            DspError::InvalidSize(_) => "InvalidSize",
            DspError::InvalidWindowSpec(_) => "InvalidWindowSpec",
            DspError::EmptyClip => "EmptyClip",
            DspError::NegativeMagnitude(_) => "NegativeMagnitude",
            DspError::MalformedBuffer(_) => "MalformedBuffer",
        }
    }
}
