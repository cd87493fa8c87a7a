//! Test-only helpers: a byte-level RIFF/WAVE writer and deterministic signal
//! generators.
//!
//! The writer is deliberately independent of the decoder in `wavescope-core`.
//! It lays out every header field by hand so the decoder can be checked
//! against known byte positions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sample encodings supported by the fixture writer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    U8,
    I16,
    I24,
    I32,
    F32,
    F64,
}

impl Encoding {
    pub const ALL: [Encoding; 6] = [
        Encoding::U8,
        Encoding::I16,
        Encoding::I24,
        Encoding::I32,
        Encoding::F32,
        Encoding::F64,
    ];

    pub fn bits(self) -> u16 {
        match self {
            Encoding::U8 => 8,
            Encoding::I16 => 16,
            Encoding::I24 => 24,
            Encoding::I32 | Encoding::F32 => 32,
            Encoding::F64 => 64,
        }
    }

    pub fn format_code(self) -> u16 {
        match self {
            Encoding::F32 | Encoding::F64 => 3,
            _ => 1,
        }
    }

    pub fn is_float(self) -> bool {
        self.format_code() == 3
    }

    /// Quantize a value in [-1, 1] to the raw integer stored for this
    /// encoding (8-bit is offset binary). Panics for float encodings.
    pub fn quantize(self, x: f64) -> i64 {
        assert!(!self.is_float());
        let scale = (1i64 << (self.bits() - 1)) as f64;
        let lo = -(1i64 << (self.bits() - 1));
        let hi = (1i64 << (self.bits() - 1)) - 1;
        let raw = ((x * scale).round() as i64).clamp(lo, hi);
        if self == Encoding::U8 {
            raw + 128
        } else {
            raw
        }
    }
}

/// Builder for a WAV byte image.
#[derive(Debug, Clone)]
pub struct WavFixture {
    pub encoding: Encoding,
    pub channels: u16,
    pub sample_rate: u32,
    pub extensible: bool,
    /// Chunks written between `fmt ` and `data`.
    pub extra_chunks: Vec<([u8; 4], Vec<u8>)>,
    /// When set, the `data` size field claims this many bytes regardless of
    /// the payload actually written.
    pub declared_data_len: Option<u32>,
}

impl WavFixture {
    pub fn new(encoding: Encoding, channels: u16, sample_rate: u32) -> Self {
        Self {
            encoding,
            channels,
            sample_rate,
            extensible: false,
            extra_chunks: Vec::new(),
            declared_data_len: None,
        }
    }

    pub fn extensible(mut self) -> Self {
        self.extensible = true;
        self
    }

    pub fn with_chunk(mut self, tag: &[u8; 4], payload: Vec<u8>) -> Self {
        self.extra_chunks.push((*tag, payload));
        self
    }

    pub fn declaring_data_len(mut self, len: u32) -> Self {
        self.declared_data_len = Some(len);
        self
    }

    pub fn block_align(&self) -> u16 {
        self.channels * self.encoding.bits() / 8
    }

    /// Offset of the first payload byte of `data` in the finished file.
    pub fn data_offset(&self) -> usize {
        let fmt_len = if self.extensible { 40 } else { 16 };
        let mut off = 12 + 8 + fmt_len;
        for (_, p) in &self.extra_chunks {
            off += 8 + p.len() + (p.len() & 1);
        }
        off + 8
    }

    /// Encode interleaved raw integers (offset binary for 8-bit).
    pub fn build_raw(&self, interleaved: &[i64]) -> Vec<u8> {
        assert!(!self.encoding.is_float());
        let mut data = Vec::with_capacity(interleaved.len() * 4);
        for &v in interleaved {
            match self.encoding {
                Encoding::U8 => data.push(v as u8),
                Encoding::I16 => data.extend_from_slice(&(v as i16).to_le_bytes()),
                Encoding::I24 => data.extend_from_slice(&(v as i32).to_le_bytes()[..3]),
                Encoding::I32 => data.extend_from_slice(&(v as i32).to_le_bytes()),
                _ => unreachable!(),
            }
        }
        self.assemble(&data)
    }

    /// Encode interleaved real values. Integer encodings are quantized with
    /// [`Encoding::quantize`].
    pub fn build(&self, interleaved: &[f64]) -> Vec<u8> {
        match self.encoding {
            Encoding::F32 => {
                let mut data = Vec::with_capacity(interleaved.len() * 4);
                for &v in interleaved {
                    data.extend_from_slice(&(v as f32).to_le_bytes());
                }
                self.assemble(&data)
            }
            Encoding::F64 => {
                let mut data = Vec::with_capacity(interleaved.len() * 8);
                for &v in interleaved {
                    data.extend_from_slice(&v.to_le_bytes());
                }
                self.assemble(&data)
            }
            enc => {
                let raw: Vec<i64> = interleaved.iter().map(|&v| enc.quantize(v)).collect();
                self.build_raw(&raw)
            }
        }
    }

    /// Mono convenience: encode `samples` with every channel carrying the
    /// same value.
    pub fn build_mono(&self, samples: &[f64]) -> Vec<u8> {
        let ch = self.channels as usize;
        let mut inter = Vec::with_capacity(samples.len() * ch);
        for &s in samples {
            inter.extend(std::iter::repeat_n(s, ch));
        }
        self.build(&inter)
    }

    fn assemble(&self, data: &[u8]) -> Vec<u8> {
        let mut out = Vec::with_capacity(data.len() + 128);
        out.extend_from_slice(b"RIFF");
        out.extend_from_slice(&[0; 4]);
        out.extend_from_slice(b"WAVE");

        out.extend_from_slice(b"fmt ");
        let bits = self.encoding.bits();
        let rate = self.sample_rate;
        let align = self.block_align();
        if self.extensible {
            out.extend_from_slice(&40u32.to_le_bytes());
            out.extend_from_slice(&0xFFFEu16.to_le_bytes());
        } else {
            out.extend_from_slice(&16u32.to_le_bytes());
            out.extend_from_slice(&self.encoding.format_code().to_le_bytes());
        }
        out.extend_from_slice(&self.channels.to_le_bytes());
        out.extend_from_slice(&rate.to_le_bytes());
        out.extend_from_slice(&(rate * align as u32).to_le_bytes());
        out.extend_from_slice(&align.to_le_bytes());
        out.extend_from_slice(&bits.to_le_bytes());
        if self.extensible {
            out.extend_from_slice(&22u16.to_le_bytes());
            out.extend_from_slice(&bits.to_le_bytes());
            out.extend_from_slice(&0u32.to_le_bytes());
            out.extend_from_slice(&sub_format_guid(self.encoding.format_code()));
        }

        for (tag, payload) in &self.extra_chunks {
            out.extend_from_slice(tag);
            out.extend_from_slice(&(payload.len() as u32).to_le_bytes());
            out.extend_from_slice(payload);
            if payload.len() % 2 == 1 {
                out.push(0);
            }
        }

        out.extend_from_slice(b"data");
        let declared = self.declared_data_len.unwrap_or(data.len() as u32);
        out.extend_from_slice(&declared.to_le_bytes());
        out.extend_from_slice(data);
        if data.len() % 2 == 1 {
            out.push(0);
        }

        let riff_len = (out.len() - 8) as u32;
        out[4..8].copy_from_slice(&riff_len.to_le_bytes());
        out
    }
}

/// KSDATAFORMAT sub-format GUID for the given plain format code.
pub fn sub_format_guid(code: u16) -> [u8; 16] {
    let mut g = [
        0, 0, 0, 0, 0x00, 0x00, 0x10, 0x00, 0x80, 0x00, 0x00, 0xAA, 0x00, 0x38, 0x9B, 0x71,
    ];
    g[..2].copy_from_slice(&code.to_le_bytes());
    g
}

/// `secs` seconds of a sine at `freq` Hz with peak amplitude `amp`.
pub fn sine(freq: f64, sample_rate: u32, secs: f64, amp: f64) -> Vec<f64> {
    let n = (secs * sample_rate as f64).round() as usize;
    (0..n)
        .map(|i| amp * (2.0 * std::f64::consts::PI * freq * i as f64 / sample_rate as f64).sin())
        .collect()
}

/// Uniform noise in [-amp, amp], reproducible from `seed`.
pub fn white_noise(seed: u64, n: usize, amp: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-amp..=amp)).collect()
}

/// Linear chirp from `f0` to `f1` Hz over `secs` seconds.
pub fn chirp(f0: f64, f1: f64, sample_rate: u32, secs: f64, amp: f64) -> Vec<f64> {
    let n = (secs * sample_rate as f64).round() as usize;
    let k = (f1 - f0) / secs;
    (0..n)
        .map(|i| {
            let t = i as f64 / sample_rate as f64;
            amp * (2.0 * std::f64::consts::PI * (f0 * t + 0.5 * k * t * t)).sin()
        })
        .collect()
}

/// The bundled `fixtures/test.wav`: 3 s of 16-bit mono at 22050 Hz. A
/// 1 kHz tone for the first second, a 200 Hz to 8 kHz sweep for the next
/// 1.5 s, then half a second of quiet noise.
pub fn demo_recording() -> Vec<u8> {
    let rate = 22050;
    let mut s = sine(1000.0, rate, 1.0, 0.5);
    s.extend(chirp(200.0, 8000.0, rate, 1.5, 0.7));
    s.extend(white_noise(2024, rate as usize / 2, 0.1));
    WavFixture::new(Encoding::I16, 1, rate).build_mono(&s)
}
