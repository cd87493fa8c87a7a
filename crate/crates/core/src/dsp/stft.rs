use num_complex::Complex;
use rayon::prelude::*;

use crate::scalar::Sample;
use crate::wav::AudioClip;

use super::{DspError, FftPlan, SpectrogramMatrix, SpectrogramMeta, WindowSpec};

/// Non-negative-frequency half of one frame's DFT, bins `0..=N/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    pub bins: Vec<Complex<T>>,
}

/// Number of STFT frames for a signal of `len` samples.
///
/// Samples after the last full window are dropped; a non-empty signal
/// shorter than one window yields a single zero-padded frame.
pub fn frame_count(len: usize, window_size: usize, hop_size: usize) -> usize {
    if len == 0 {
        0
    } else if len < window_size {
        1
    } else {
        (len - window_size) / hop_size + 1
    }
}

/// Natural log of `1 + magnitude`.
pub fn log_compress<T: Sample>(magnitude: T) -> Result<T, DspError> {
    if magnitude.is_nan() || magnitude < T::zero() {
        return Err(DspError::NegativeMagnitude(magnitude.as_f64()));
    }
    Ok(magnitude.ln_1p())
}

/// Fill `buf` with windowed frame `f` of `samples`, zero-padding past the end.
fn load_frame<S: Sample, T: Sample>(
    samples: &[S],
    f: usize,
    hop: usize,
    window: &[T],
    buf: &mut [Complex<T>],
) {
    let start = f * hop;
    let avail = samples.len().saturating_sub(start).min(window.len());
    for (i, slot) in buf.iter_mut().enumerate() {
        let x = if i < avail {
            T::of(samples[start + i].as_f64()) * window[i]
        } else {
            T::zero()
        };
        *slot = Complex::new(x, T::zero());
    }
}

fn check<T: Sample>(clip: &AudioClip<T>, spec: &WindowSpec) -> Result<(), DspError> {
    spec.validate()?;
    if clip.is_empty() {
        return Err(DspError::EmptyClip);
    }
    Ok(())
}

/// Short-time Fourier transform of a clip, one [`Spectrum`] per frame.
pub fn stft<T: Sample>(
    clip: &AudioClip<T>,
    spec: &WindowSpec,
) -> Result<Vec<Spectrum<T>>, DspError> {
    check(clip, spec)?;
    let n = spec.window_size;
    let plan = FftPlan::<T>::new(n)?;
    let window: Vec<T> = spec.shape.coefficients(n)?;
    let frames = frame_count(clip.len(), n, spec.hop_size);
    let keep = spec.bin_count();

    Ok((0..frames)
        .into_par_iter()
        .map_init(
            || vec![Complex::new(T::zero(), T::zero()); n],
            |buf, f| {
                load_frame(clip.samples(), f, spec.hop_size, &window, buf);
                plan.forward(buf);
                Spectrum {
                    bins: buf[..keep].to_vec(),
                }
            },
        )
        .collect())
}

/// Log-magnitude spectrogram: `values[f][k] = ln(1 + |STFT[f][k]|)`.
///
/// The transform runs in `f64` whatever the clip's sample type; values are
/// stored as `T`. Frames are computed independently, so the result does not
/// depend on the thread count.
pub fn spectrogram<T: Sample>(
    clip: &AudioClip<T>,
    spec: &WindowSpec,
) -> Result<SpectrogramMatrix<T>, DspError> {
    check(clip, spec)?;
    let n = spec.window_size;
    let plan = FftPlan::<f64>::new(n)?;
    let window: Vec<f64> = spec.shape.coefficients(n)?;
    let frames = frame_count(clip.len(), n, spec.hop_size);
    let bins = spec.bin_count();

    let mut values = vec![T::zero(); frames * bins];
    values.par_chunks_mut(bins).enumerate().for_each_init(
        || vec![Complex::new(0.0, 0.0); n],
        |buf, (f, row)| {
            load_frame(clip.samples(), f, spec.hop_size, &window, buf);
            plan.forward(buf);
            for (out, z) in row.iter_mut().zip(buf.iter()) {
                *out = T::of(z.norm().ln_1p());
            }
        },
    );

    Ok(SpectrogramMatrix {
        meta: SpectrogramMeta {
            frames,
            bins,
            sample_rate: clip.sample_rate(),
            window_size: n,
            hop_size: spec.hop_size,
            origin_time: clip.origin_offset(),
            frame_offset: 0,
            bin_offset: 0,
        },
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clip(samples: Vec<f64>, rate: u32) -> AudioClip<f64> {
        AudioClip::new(samples, rate).unwrap()
    }

    #[test]
    fn frame_count_examples() {
        assert_eq!(frame_count(4096, 2048, 1024), 3);
        assert_eq!(frame_count(2048, 2048, 1024), 1);
        assert_eq!(frame_count(1000, 2048, 1024), 1);
        assert_eq!(frame_count(0, 2048, 1024), 0);
        assert_eq!(frame_count(5119, 2048, 1024), 3);
    }

    #[test]
    fn short_clip_is_zero_padded() {
        let c = clip(vec![0.5; 1000], 8000);
        let spec = WindowSpec::default();
        let frames = stft(&c, &spec).unwrap();
        assert_eq!(frames.len(), 1);
        assert_eq!(frames[0].bins.len(), 1025);
        // DC = sum of the first 1000 window coefficients times 0.5
        let w: Vec<f64> = crate::dsp::hann_window(2048).unwrap();
        let dc: f64 = w[..1000].iter().sum::<f64>() * 0.5;
        assert!((frames[0].bins[0].re - dc).abs() < 1e-9);
    }

    #[test]
    fn empty_clip_is_rejected() {
        let c = clip(vec![], 8000);
        assert_eq!(stft(&c, &WindowSpec::default()), Err(DspError::EmptyClip));
        assert_eq!(
            spectrogram(&c, &WindowSpec::default()).unwrap_err(),
            DspError::EmptyClip
        );
    }

    #[test]
    fn log_compress_examples() {
        assert_eq!(log_compress(0.0f64).unwrap(), 0.0);
        assert!((log_compress(std::f64::consts::E - 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(log_compress(-1e-3f64).is_err());
        assert!(log_compress(f64::NAN).is_err());
    }

    #[test]
    fn silence_is_all_zero() {
        let c = clip(vec![0.0; 8192], 44100);
        let m = spectrogram(&c, &WindowSpec::default()).unwrap();
        assert_eq!(m.frames(), 7);
        assert!(m.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn spectrogram_matches_stft_magnitudes() {
        let samples: Vec<f64> = (0..3000)
            .map(|i| ((i * 7919) % 211) as f64 / 211.0 - 0.5)
            .collect();
        let c = clip(samples, 16000);
        let spec = WindowSpec::new(256, 64).unwrap();
        let frames = stft(&c, &spec).unwrap();
        let m = spectrogram(&c, &spec).unwrap();
        assert_eq!(m.frames(), frames.len());
        for (f, s) in frames.iter().enumerate() {
            for (k, z) in s.bins.iter().enumerate() {
                assert!((m.get(f, k) - z.norm().ln_1p()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn metadata_from_clip_and_spec() {
        let c = clip(vec![0.1; 44100], 44100).with_origin(2.0);
        let m = spectrogram(&c, &WindowSpec::default()).unwrap();
        assert_eq!(m.meta.time_step(), 1024.0 / 44100.0);
        assert_eq!(m.meta.freq_step(), 44100.0 / 2048.0);
        assert_eq!(m.meta.start_time(), 2.0);
        assert_eq!(m.meta.max_frequency(), 22050.0);
    }
}
