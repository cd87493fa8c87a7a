use serde::Serialize;

use crate::scalar::Sample;
use crate::wav::AudioClip;

use super::{Interval, VizError};

const MAGIC: &[u8; 4] = b"WSWF";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bucket<T> {
    pub min: T,
    pub max: T,
}

/// Min/max envelope of a run of samples.
///
/// Bucket `i` covers samples `floor(i*L/B) .. floor((i+1)*L/B)` of the
/// summarized region, where `L` is `len_samples` and `B` the bucket count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveformSummary<T> {
    pub buckets: Vec<Bucket<T>>,
    pub sample_rate: u32,
    /// Samples in the summarized region.
    pub len_samples: usize,
    /// Time of the first summarized sample in the source recording.
    pub start_time: f64,
    /// Duration of the whole source clip.
    pub source_duration: f64,
}

impl<T: Sample> WaveformSummary<T> {
    pub fn len(&self) -> usize {
        self.buckets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }

    /// Nominal seconds per bucket.
    pub fn bucket_duration(&self) -> f64 {
        self.len_samples as f64 / self.buckets.len() as f64 / self.sample_rate as f64
    }

    pub fn region_duration(&self) -> f64 {
        self.len_samples as f64 / self.sample_rate as f64
    }

    /// `[start, end)` time of bucket `i`.
    pub fn bucket_span(&self, i: usize) -> (f64, f64) {
        let b = self.buckets.len();
        let rate = self.sample_rate as f64;
        let s0 = bucket_boundary(i, self.len_samples, b);
        let s1 = bucket_boundary(i + 1, self.len_samples, b);
        (
            self.start_time + s0 as f64 / rate,
            self.start_time + s1 as f64 / rate,
        )
    }

    pub fn global_min(&self) -> Option<T> {
        self.buckets.iter().map(|b| b.min).reduce(T::min)
    }

    pub fn global_max(&self) -> Option<T> {
        self.buckets.iter().map(|b| b.max).reduce(T::max)
    }

    /// 40-byte little-endian header followed by `(min, max)` pairs as `f32`.
    ///
    /// ```text
    /// 0  "WSWF"   4  version u32   8  buckets u32   12 sample_rate u32
    /// 16 len_samples u64   24 start_time f64   32 source_duration f64
    /// ```
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.buckets.len() * 8);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.buckets.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.sample_rate.to_le_bytes());
        out.extend_from_slice(&(self.len_samples as u64).to_le_bytes());
        out.extend_from_slice(&self.start_time.to_le_bytes());
        out.extend_from_slice(&self.source_duration.to_le_bytes());
        for b in &self.buckets {
            out.extend_from_slice(&(b.min.as_f64() as f32).to_le_bytes());
            out.extend_from_slice(&(b.max.as_f64() as f32).to_le_bytes());
        }
        out
    }
}

impl WaveformSummary<f32> {
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, VizError> {
        let bad = |m: &str| VizError::MalformedBuffer(m.to_string());
        if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
            return Err(bad("missing WSWF header"));
        }
        let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
        let f64_at = |i: usize| f64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
        if u32_at(4) != VERSION {
            return Err(bad("unsupported version"));
        }
        let count = u32_at(8) as usize;
        let body = &bytes[HEADER_LEN..];
        if count.checked_mul(8) != Some(body.len()) {
            return Err(bad("bucket count does not match payload"));
        }
        let f32_at = |b: &[u8]| f32::from_le_bytes(b.try_into().unwrap());
        Ok(Self {
            buckets: body
                .chunks_exact(8)
                .map(|p| Bucket {
                    min: f32_at(&p[..4]),
                    max: f32_at(&p[4..]),
                })
                .collect(),
            sample_rate: u32_at(12),
            len_samples: u64::from_le_bytes(bytes[16..24].try_into().unwrap()) as usize,
            start_time: f64_at(24),
            source_duration: f64_at(32),
        })
    }
}

#[inline]
fn bucket_boundary(i: usize, len: usize, buckets: usize) -> usize {
    ((i as u128 * len as u128) / buckets as u128) as usize
}

/// Summarize a whole clip into `bucket_count` min/max pairs.
///
/// When `bucket_count >= len` every sample gets its own bucket.
pub fn decimate_minmax<T: Sample>(
    clip: &AudioClip<T>,
    bucket_count: usize,
) -> Result<WaveformSummary<T>, VizError> {
    summarize(clip, 0, clip.len(), bucket_count)
}

/// Summarize the samples of `clip` that fall inside `time` (seconds in the
/// source recording).
pub fn decimate_range<T: Sample>(
    clip: &AudioClip<T>,
    time: Interval,
    bucket_count: usize,
) -> Result<WaveformSummary<T>, VizError> {
    if clip.is_empty() {
        return Err(VizError::EmptyClip);
    }
    let rate = clip.sample_rate() as f64;
    let len = clip.len();
    let to_index = |t: f64| ((t - clip.origin_offset()) * rate).clamp(0.0, len as f64);
    let first = to_index(time.lo).floor() as usize;
    let last = (to_index(time.hi).ceil() as usize).min(len);
    if last <= first {
        return Err(VizError::EmptyResult("time range holds no samples".into()));
    }
    summarize(clip, first, last, bucket_count)
}

fn summarize<T: Sample>(
    clip: &AudioClip<T>,
    first: usize,
    last: usize,
    bucket_count: usize,
) -> Result<WaveformSummary<T>, VizError> {
    if clip.is_empty() {
        return Err(VizError::EmptyClip);
    }
    if bucket_count == 0 {
        return Err(VizError::InvalidBucketCount(bucket_count));
    }
    let region = &clip.samples()[first..last];
    let len = region.len();
    let count = bucket_count.min(len);
    let buckets = (0..count)
        .map(|i| {
            let run = &region[bucket_boundary(i, len, count)..bucket_boundary(i + 1, len, count)];
            let (min, max) = run
                .iter()
                .fold((run[0], run[0]), |(lo, hi), &s| (lo.min(s), hi.max(s)));
            Bucket { min, max }
        })
        .collect();
    Ok(WaveformSummary {
        buckets,
        sample_rate: clip.sample_rate(),
        len_samples: len,
        start_time: clip.origin_offset() + first as f64 / clip.sample_rate() as f64,
        source_duration: clip.duration_seconds(),
    })
}
