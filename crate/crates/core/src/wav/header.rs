use std::io::{Cursor, Read, Seek, SeekFrom};

use super::WavError;

const FORMAT_PCM: u16 = 1;
const FORMAT_IEEE_FLOAT: u16 = 3;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

/// Bytes 2..16 shared by every KSDATAFORMAT sub-format GUID.
const GUID_TAIL: [u8; 14] = [
    0x00, 0x00, 0x00, 0x00, 0x10, 0x00, 0x80, 0x00, 0x00, 0xAA, 0x00, 0x38, 0x9B, 0x71,
];

/// Storage layout of one sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleEncoding {
    U8,
    I16,
    I24,
    I32,
    F32,
    F64,
}

impl SampleEncoding {
    fn from_pair(code: u16, bits: u16) -> Option<Self> {
        Some(match (code, bits) {
            (FORMAT_PCM, 8) => Self::U8,
            (FORMAT_PCM, 16) => Self::I16,
            (FORMAT_PCM, 24) => Self::I24,
            (FORMAT_PCM, 32) => Self::I32,
            (FORMAT_IEEE_FLOAT, 32) => Self::F32,
            (FORMAT_IEEE_FLOAT, 64) => Self::F64,
            _ => return None,
        })
    }

    pub fn bytes(self) -> usize {
        match self {
            Self::U8 => 1,
            Self::I16 => 2,
            Self::I24 => 3,
            Self::I32 | Self::F32 => 4,
            Self::F64 => 8,
        }
    }
}

/// Container metadata needed to locate and decode the sample frames.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FormatChunk {
    /// 1 = integer PCM, 3 = IEEE float. Extensible headers are resolved to
    /// one of these through their sub-format GUID.
    pub audio_format_code: u16,
    pub extensible: bool,
    pub channel_count: u16,
    pub sample_rate: u32,
    pub bits_per_sample: u16,
    pub block_align: u16,
    pub data_offset: u64,
    /// Whole frames actually present, in bytes.
    pub data_length: u64,
    /// Size claimed by the `data` chunk header.
    pub declared_data_length: u64,
}

impl FormatChunk {
    pub fn encoding(&self) -> SampleEncoding {
        SampleEncoding::from_pair(self.audio_format_code, self.bits_per_sample)
            .expect("validated during parsing")
    }

    pub fn frame_count(&self) -> u64 {
        self.data_length / self.block_align as u64
    }

    pub fn duration_seconds(&self) -> f64 {
        self.frame_count() as f64 / self.sample_rate as f64
    }

    pub fn is_truncated(&self) -> bool {
        self.declared_data_length > self.data_length
    }
}

/// Parse the header of an in-memory WAV file.
pub fn parse_wav_header(bytes: &[u8]) -> Result<FormatChunk, WavError> {
    read_header(&mut Cursor::new(bytes))
}

/// Parse the header through a seekable reader.
///
/// Only chunk headers and the `fmt ` payload are read; other chunks are
/// skipped by seeking. The reader is left at an unspecified position.
pub fn read_header<R: Read + Seek>(reader: &mut R) -> Result<FormatChunk, WavError> {
    let total = reader.seek(SeekFrom::End(0))?;
    if total < 12 {
        return Err(malformed("file shorter than the RIFF header"));
    }
    reader.seek(SeekFrom::Start(0))?;
    let mut riff = [0u8; 12];
    reader.read_exact(&mut riff)?;
    if &riff[0..4] != b"RIFF" {
        return Err(malformed("missing RIFF magic"));
    }
    if &riff[8..12] != b"WAVE" {
        return Err(malformed("missing WAVE form type"));
    }

    let mut fmt: Option<RawFmt> = None;
    let mut data: Option<(u64, u64)> = None;
    let mut pos = 12u64;

    while pos + 8 <= total && (fmt.is_none() || data.is_none()) {
        reader.seek(SeekFrom::Start(pos))?;
        let mut head = [0u8; 8];
        reader.read_exact(&mut head)?;
        let size = u32::from_le_bytes([head[4], head[5], head[6], head[7]]) as u64;
        let body = pos + 8;

        match &head[0..4] {
            b"fmt " if fmt.is_none() => {
                if body + size > total {
                    return Err(malformed("truncated fmt chunk"));
                }
                if size < 16 {
                    return Err(malformed("fmt chunk shorter than 16 bytes"));
                }
                let mut buf = vec![0u8; size.min(40) as usize];
                reader.read_exact(&mut buf)?;
                fmt = Some(RawFmt::parse(&buf)?);
            }
            b"data" if data.is_none() => {
                data = Some((body, size));
                if fmt.is_some() {
                    break;
                }
            }
            _ => {}
        }

        // A data chunk may run past the end of a cut recording; any other
        // chunk must fit.
        let next = body + size + (size & 1);
        if next > total && &head[0..4] != b"data" {
            return Err(malformed("truncated chunk"));
        }
        pos = next;
    }

    let fmt = fmt.ok_or_else(|| malformed("missing fmt chunk"))?;
    let (data_offset, declared) = data.ok_or_else(|| malformed("missing data chunk"))?;

    let available = total.saturating_sub(data_offset).min(declared);
    let align = fmt.block_align as u64;
    let data_length = available - available % align;

    Ok(FormatChunk {
        audio_format_code: fmt.code,
        extensible: fmt.extensible,
        channel_count: fmt.channels,
        sample_rate: fmt.sample_rate,
        bits_per_sample: fmt.bits,
        block_align: fmt.block_align,
        data_offset,
        data_length,
        declared_data_length: declared,
    })
}

struct RawFmt {
    code: u16,
    extensible: bool,
    channels: u16,
    sample_rate: u32,
    block_align: u16,
    bits: u16,
}

impl RawFmt {
    fn parse(buf: &[u8]) -> Result<Self, WavError> {
        let u16_at = |i: usize| u16::from_le_bytes([buf[i], buf[i + 1]]);
        let tag = u16_at(0);
        let channels = u16_at(2);
        let sample_rate = u32::from_le_bytes([buf[4], buf[5], buf[6], buf[7]]);
        let block_align = u16_at(12);
        let bits = u16_at(14);

        let (code, extensible) = if tag == FORMAT_EXTENSIBLE {
            if buf.len() < 40 || u16_at(16) < 22 {
                return Err(malformed("extensible fmt chunk too short"));
            }
            let guid = &buf[24..40];
            if guid[2..] != GUID_TAIL {
                return Err(WavError::UnsupportedFormat { code: tag, bits });
            }
            (u16::from_le_bytes([guid[0], guid[1]]), true)
        } else {
            (tag, false)
        };

        if SampleEncoding::from_pair(code, bits).is_none() {
            return Err(WavError::UnsupportedFormat { code, bits });
        }
        if channels == 0 {
            return Err(malformed("zero channels"));
        }
        if sample_rate == 0 {
            return Err(malformed("zero sample rate"));
        }
        if block_align as u32 != channels as u32 * (bits as u32 / 8) {
            return Err(malformed(
                "block_align disagrees with channels and bit depth",
            ));
        }
        Ok(Self {
            code,
            extensible,
            channels,
            sample_rate,
            block_align,
            bits,
        })
    }
}

fn malformed(msg: &str) -> WavError {
    WavError::MalformedContainer(msg.to_string())
}
