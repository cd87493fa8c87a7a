use std::io::{Cursor, Read, Seek, SeekFrom};

use crate::scalar::Sample;

use super::header::{read_header, FormatChunk, SampleEncoding};
use super::{AudioClip, ClipWarning, WavError};

/// How multichannel frames are reduced to mono.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Downmix {
    /// Keep channel 0 only.
    #[default]
    FirstChannel,
    /// Arithmetic mean of all channels.
    Average,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecodeOptions {
    pub downmix: Downmix,
}

/// A time window within a recording.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SliceRequest {
    pub start_seconds: f64,
    pub duration_seconds: f64,
}

impl SliceRequest {
    pub fn new(start_seconds: f64, duration_seconds: f64) -> Self {
        Self {
            start_seconds,
            duration_seconds,
        }
    }

    /// Resolve to `(first_frame, frame_count)` against a clip of
    /// `total_frames` frames. The start is rounded to the nearest frame, the
    /// length is floored and then clamped to the end of the clip.
    pub fn frame_range(&self, total_frames: u64, sample_rate: u32) -> Result<(u64, u64), WavError> {
        let (start, dur) = (self.start_seconds, self.duration_seconds);
        if !start.is_finite() || start < 0.0 {
            return Err(WavError::InvalidSliceRequest(format!(
                "start {start} must be finite and non-negative"
            )));
        }
        if !dur.is_finite() || dur <= 0.0 {
            return Err(WavError::InvalidSliceRequest(format!(
                "duration {dur} must be finite and positive"
            )));
        }
        let rate = sample_rate as f64;
        let clip_duration = total_frames as f64 / rate;
        if start >= clip_duration {
            return Err(WavError::RangeOutOfBounds {
                start,
                duration: clip_duration,
            });
        }
        let first = ((start * rate).round() as u64).min(total_frames);
        let wanted = (dur * rate).floor() as u64;
        let count = wanted.min(total_frames - first);
        if count == 0 {
            return Err(WavError::EmptySlice);
        }
        Ok((first, count))
    }
}

/// Map a raw integer sample to [-1, 1].
///
/// Signed formats divide by 2^(bits-1); 8-bit audio is offset binary and maps
/// through `(raw - 128) / 128`.
pub fn normalize_sample(raw: i32, bits_per_sample: u16) -> f64 {
    if bits_per_sample == 8 {
        (raw as f64 - 128.0) / 128.0
    } else {
        raw as f64 / (1u64 << (bits_per_sample - 1)) as f64
    }
}

/// Decode every frame of an in-memory WAV file to mono.
pub fn decode_full<T: Sample>(bytes: &[u8]) -> Result<AudioClip<T>, WavError> {
    decode_full_with(bytes, DecodeOptions::default())
}

pub fn decode_full_with<T: Sample>(
    bytes: &[u8],
    opts: DecodeOptions,
) -> Result<AudioClip<T>, WavError> {
    let fmt = read_header(&mut Cursor::new(bytes))?;
    let start = fmt.data_offset as usize;
    let data = &bytes[start..start + fmt.data_length as usize];
    let samples = decode_frames(data, &fmt, opts.downmix);
    Ok(AudioClip::from_normalized(samples, fmt.sample_rate).with_warnings(warnings(&fmt)))
}

/// Decode a time window of an in-memory WAV file.
pub fn decode_slice<T: Sample>(bytes: &[u8], req: SliceRequest) -> Result<AudioClip<T>, WavError> {
    decode_slice_from(&mut Cursor::new(bytes), req)
}

pub fn decode_slice_with<T: Sample>(
    bytes: &[u8],
    req: SliceRequest,
    opts: DecodeOptions,
) -> Result<AudioClip<T>, WavError> {
    slice_impl(&mut Cursor::new(bytes), req, opts)
}

/// Decode a time window through a seekable reader.
///
/// Reads the header chunks and then exactly the bytes of the requested
/// frames; nothing else in the data chunk is touched.
pub fn decode_slice_from<T: Sample, R: Read + Seek>(
    reader: &mut R,
    req: SliceRequest,
) -> Result<AudioClip<T>, WavError> {
    slice_impl(reader, req, DecodeOptions::default())
}

fn slice_impl<T: Sample, R: Read + Seek>(
    reader: &mut R,
    req: SliceRequest,
    opts: DecodeOptions,
) -> Result<AudioClip<T>, WavError> {
    let fmt = read_header(reader)?;
    let (first, count) = req.frame_range(fmt.frame_count(), fmt.sample_rate)?;
    let align = fmt.block_align as u64;
    reader.seek(SeekFrom::Start(fmt.data_offset + first * align))?;
    let mut data = vec![0u8; (count * align) as usize];
    reader.read_exact(&mut data)?;
    let samples = decode_frames(&data, &fmt, opts.downmix);
    Ok(AudioClip::from_normalized(samples, fmt.sample_rate)
        .with_origin(req.start_seconds)
        .with_warnings(warnings(&fmt)))
}

fn warnings(fmt: &FormatChunk) -> Vec<ClipWarning> {
    if fmt.is_truncated() {
        vec![ClipWarning::TruncatedData {
            declared: fmt.declared_data_length,
            available: fmt.data_length,
        }]
    } else {
        Vec::new()
    }
}

fn decode_frames<T: Sample>(data: &[u8], fmt: &FormatChunk, downmix: Downmix) -> Vec<T> {
    let bits = fmt.bits_per_sample;
    match fmt.encoding() {
        SampleEncoding::U8 => collect(data, fmt, downmix, |b| normalize_sample(b[0] as i32, 8)),
        SampleEncoding::I16 => collect(data, fmt, downmix, |b| {
            normalize_sample(i16::from_le_bytes([b[0], b[1]]) as i32, bits)
        }),
        SampleEncoding::I24 => collect(data, fmt, downmix, |b| {
            // sign-extend through the top byte of an i32
            normalize_sample(i32::from_le_bytes([0, b[0], b[1], b[2]]) >> 8, bits)
        }),
        SampleEncoding::I32 => collect(data, fmt, downmix, |b| {
            normalize_sample(i32::from_le_bytes([b[0], b[1], b[2], b[3]]), bits)
        }),
        SampleEncoding::F32 => collect(data, fmt, downmix, |b| {
            clamp_float(f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64)
        }),
        SampleEncoding::F64 => collect(data, fmt, downmix, |b| {
            clamp_float(f64::from_le_bytes([
                b[0], b[1], b[2], b[3], b[4], b[5], b[6], b[7],
            ]))
        }),
    }
}

fn clamp_float(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(-1.0, 1.0)
    }
}

#[inline]
fn collect<T: Sample, F: Fn(&[u8]) -> f64>(
    data: &[u8],
    fmt: &FormatChunk,
    downmix: Downmix,
    read: F,
) -> Vec<T> {
    let align = fmt.block_align as usize;
    let width = fmt.encoding().bytes();
    let frames = data.chunks_exact(align);
    match downmix {
        Downmix::FirstChannel => frames.map(|f| T::of(read(&f[..width]))).collect(),
        Downmix::Average => {
            let channels = fmt.channel_count as f64;
            frames
                .map(|f| {
                    let sum: f64 = f.chunks_exact(width).map(&read).sum();
                    T::of((sum / channels).clamp(-1.0, 1.0))
                })
                .collect()
        }
    }
}

/// Serialize samples as headerless 32-bit little-endian IEEE floats.
pub fn export_f32le<T: Sample>(clip: &AudioClip<T>) -> Vec<u8> {
    let mut out = Vec::with_capacity(clip.len() * 4);
    for &s in clip.samples() {
        out.extend_from_slice(&(s.as_f64() as f32).to_le_bytes());
    }
    out
}

/// Inverse of [`export_f32le`]. Trailing bytes that do not form a whole
/// sample are ignored.
pub fn import_f32le(bytes: &[u8]) -> Vec<f32> {
    bytes
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .collect()
}

/// Reader adapter that counts the bytes pulled through it.
#[derive(Debug)]
pub struct CountingReader<R> {
    inner: R,
    bytes_read: u64,
}

impl<R> CountingReader<R> {
    pub fn new(inner: R) -> Self {
        Self {
            inner,
            bytes_read: 0,
        }
    }

    pub fn bytes_read(&self) -> u64 {
        self.bytes_read
    }

    pub fn into_inner(self) -> R {
        self.inner
    }
}

impl<R: Read> Read for CountingReader<R> {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        let n = self.inner.read(buf)?;
        self.bytes_read += n as u64;
        Ok(n)
    }
}

impl<R: Seek> Seek for CountingReader<R> {
    fn seek(&mut self, pos: SeekFrom) -> std::io::Result<u64> {
        self.inner.seek(pos)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use wavescope_testkit::{Encoding, WavFixture};

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_sample(-32768, 16), -1.0);
        assert_eq!(normalize_sample(16384, 16), 0.5);
        assert_eq!(normalize_sample(255, 8), 0.9921875);
        assert_eq!(normalize_sample(0, 8), -1.0);
        assert_eq!(normalize_sample(-8_388_608, 24), -1.0);
        assert_eq!(normalize_sample(i32::MIN, 32), -1.0);
        assert!(normalize_sample(i32::MAX, 32) < 1.0);
    }

    #[test]
    fn pcm16_decodes_to_normalized_values() {
        let bytes = WavFixture::new(Encoding::I16, 1, 8000).build_raw(&[-32768, 0, 16384]);
        let clip: AudioClip<f64> = decode_full(&bytes).unwrap();
        assert_eq!(clip.samples(), &[-1.0, 0.0, 0.5]);
        assert_eq!(clip.origin_offset(), 0.0);
        assert!(clip.warnings().is_empty());
    }

    #[test]
    fn float32_passes_through_and_clamps() {
        let bytes = WavFixture::new(Encoding::F32, 1, 8000).build(&[0.25, -0.5, 1.5, -3.0]);
        let clip: AudioClip<f32> = decode_full(&bytes).unwrap();
        assert_eq!(clip.samples(), &[0.25, -0.5, 1.0, -1.0]);
    }

    #[test]
    fn float_nan_becomes_silence() {
        let bytes = WavFixture::new(Encoding::F64, 1, 8000).build(&[f64::NAN, 0.125]);
        let clip: AudioClip<f64> = decode_full(&bytes).unwrap();
        assert_eq!(clip.samples(), &[0.0, 0.125]);
    }

    #[test]
    fn stereo_keeps_channel_zero() {
        let bytes = WavFixture::new(Encoding::I16, 2, 8000).build_raw(&[1000, 9999, 2000, 9999]);
        let clip: AudioClip<f64> = decode_full(&bytes).unwrap();
        assert_eq!(clip.samples(), &[1000.0 / 32768.0, 2000.0 / 32768.0]);

        let avg: AudioClip<f64> = decode_full_with(
            &bytes,
            DecodeOptions {
                downmix: Downmix::Average,
            },
        )
        .unwrap();
        assert_eq!(avg.samples()[0], (1000.0 + 9999.0) / 2.0 / 32768.0);
    }

    #[test]
    fn pcm24_sign_extends() {
        let bytes = WavFixture::new(Encoding::I24, 1, 8000).build_raw(&[-1, 4_194_304, -8_388_608]);
        let clip: AudioClip<f64> = decode_full(&bytes).unwrap();
        assert_eq!(clip.samples(), &[-1.0 / 8_388_608.0, 0.5, -1.0]);
    }

    #[test]
    fn truncated_data_decodes_available_frames() {
        let bytes = WavFixture::new(Encoding::I16, 1, 8000)
            .declaring_data_len(4000)
            .build_raw(&[16384, 16384, 16384]);
        let clip: AudioClip<f32> = decode_full(&bytes).unwrap();
        assert_eq!(clip.len(), 3);
        assert_eq!(
            clip.warnings(),
            &[ClipWarning::TruncatedData {
                declared: 4000,
                available: 6
            }]
        );
    }

    #[test]
    fn slice_index_arithmetic() {
        let samples: Vec<f64> = (0..16000).map(|i| (i % 200) as f64 / 200.0).collect();
        let bytes = WavFixture::new(Encoding::I16, 1, 8000).build(&samples);
        let full: AudioClip<f64> = decode_full(&bytes).unwrap();
        let slice: AudioClip<f64> = decode_slice(&bytes, SliceRequest::new(1.0, 0.5)).unwrap();
        assert_eq!(slice.len(), 4000);
        assert_eq!(slice.samples(), &full.samples()[8000..12000]);
        assert_eq!(slice.origin_offset(), 1.0);

        let whole: AudioClip<f64> = decode_slice(&bytes, SliceRequest::new(0.0, 2.0)).unwrap();
        assert_eq!(whole.samples(), full.samples());
    }

    #[test]
    fn slice_duration_clamps_to_end() {
        let bytes = WavFixture::new(Encoding::I16, 1, 8000).build(&vec![0.1; 8000]);
        let clip: AudioClip<f32> = decode_slice(&bytes, SliceRequest::new(0.75, 10.0)).unwrap();
        assert_eq!(clip.len(), 2000);
    }

    #[test]
    fn slice_errors() {
        let bytes = WavFixture::new(Encoding::I16, 1, 8000).build(&vec![0.1; 8000]);
        assert!(matches!(
            decode_slice::<f32>(&bytes, SliceRequest::new(1.0, 0.5)),
            Err(WavError::RangeOutOfBounds { .. })
        ));
        assert!(matches!(
            decode_slice::<f32>(&bytes, SliceRequest::new(0.0, 0.0)),
            Err(WavError::InvalidSliceRequest(_))
        ));
        assert!(matches!(
            decode_slice::<f32>(&bytes, SliceRequest::new(-1.0, 1.0)),
            Err(WavError::InvalidSliceRequest(_))
        ));
        // shorter than one frame
        assert!(matches!(
            decode_slice::<f32>(&bytes, SliceRequest::new(0.5, 1e-5)),
            Err(WavError::EmptySlice)
        ));
        // start rounds onto the final frame boundary
        assert!(matches!(
            decode_slice::<f32>(&bytes, SliceRequest::new(0.99999, 0.5)),
            Err(WavError::EmptySlice)
        ));
    }

    #[test]
    fn export_examples() {
        let clip = AudioClip::new(vec![1.0f32], 8000).unwrap();
        assert_eq!(export_f32le(&clip), vec![0x00, 0x00, 0x80, 0x3F]);
        let empty = AudioClip::<f32>::new(vec![], 8000).unwrap();
        assert!(export_f32le(&empty).is_empty());
    }

    #[test]
    fn counting_reader_counts_reads_not_seeks() {
        let mut r = CountingReader::new(Cursor::new(vec![0u8; 100]));
        r.seek(SeekFrom::Start(50)).unwrap();
        let mut buf = [0u8; 10];
        r.read_exact(&mut buf).unwrap();
        assert_eq!(r.bytes_read(), 10);
    }
}
