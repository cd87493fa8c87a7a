//! Memory-bounded audio inspection: WAV decoding, min-max waveform
//! summaries, STFT spectrograms, turbo rasters and SVG/PNG export.
//!
//! Signal types are generic over the sample scalar ([`Sample`], implemented
//! for `f32` and `f64`). The aliases below name the common instantiations.

pub mod dsp;
pub mod engine;
pub mod render;
pub mod scalar;
pub mod viz;
pub mod wav;

pub use scalar::Sample;

pub type AudioClip32 = wav::AudioClip<f32>;
pub type AudioClip64 = wav::AudioClip<f64>;
pub type Spectrogram32 = dsp::SpectrogramMatrix<f32>;
pub type Spectrogram64 = dsp::SpectrogramMatrix<f64>;
pub type Waveform32 = viz::WaveformSummary<f32>;
pub type Waveform64 = viz::WaveformSummary<f64>;
pub type FftPlan32 = dsp::FftPlan<f32>;
pub type FftPlan64 = dsp::FftPlan<f64>;

/// Crate version, reported by the command protocol and the CLI.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
