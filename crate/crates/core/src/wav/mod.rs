//! RIFF/WAVE parsing and PCM decoding.
//!
//! Two decode paths share one parser:
//!
//! * [`decode_full`] decodes every frame of an in-memory file, for waveform
//!   previews.
//! * [`decode_slice_from`] seeks straight to a frame range and reads only the
//!   header plus the bytes covering that range, for spectrogram windows.
//!
//! Output is always mono: channel 0 by default, or an average of all channels
//! with [`Downmix::Average`].

mod clip;
mod decode;
mod header;

use thiserror::Error;

pub use clip::{AudioClip, ClipWarning};
pub use decode::{
    decode_full, decode_full_with, decode_slice, decode_slice_from, decode_slice_with,
    export_f32le, import_f32le, normalize_sample, CountingReader, DecodeOptions, Downmix,
    SliceRequest,
};
pub use header::{parse_wav_header, read_header, FormatChunk, SampleEncoding};

#[derive(Debug, Error)]
pub enum WavError {
    #[error("malformed container: {0}")]
    MalformedContainer(String),
    #[error("unsupported format: code {code:#06x}, {bits} bits per sample")]
    UnsupportedFormat { code: u16, bits: u16 },
    #[error("slice start {start}s is outside a clip of {duration}s")]
    RangeOutOfBounds { start: f64, duration: f64 },
    #[error("slice request is empty after clamping to the clip")]
    EmptySlice,
    #[error("invalid slice request: {0}")]
    InvalidSliceRequest(String),
    #[error("invalid clip: {0}")]
    InvalidClip(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl WavError {
    /// Stable name used by the command protocol and CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            WavError::MalformedContainer(_) => "MalformedContainer",
            WavError::UnsupportedFormat { .. } => "UnsupportedFormat",
            WavError::RangeOutOfBounds { .. } => "RangeOutOfBounds",
            WavError::EmptySlice => "EmptySlice",
            WavError::InvalidSliceRequest(_) => "InvalidSliceRequest",
            WavError::InvalidClip(_) => "InvalidClip",
            WavError::Io(_) => "Io",
        }
    }
}
