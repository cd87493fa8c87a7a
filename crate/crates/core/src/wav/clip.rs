use crate::scalar::Sample;

use super::WavError;

/// Non-fatal conditions found while decoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClipWarning {
    /// The `data` chunk declared more bytes than the file holds.
    TruncatedData { declared: u64, available: u64 },
}

/// Mono audio normalized to [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip<T> {
    samples: Vec<T>,
    sample_rate: u32,
    origin_offset: f64,
    source_name: String,
    warnings: Vec<ClipWarning>,
}

impl<T: Sample> AudioClip<T> {
    /// Wrap samples that are already normalized. Rejects out-of-range or
    /// non-finite samples and a zero sample rate.
    pub fn new(samples: Vec<T>, sample_rate: u32) -> Result<Self, WavError> {
        if sample_rate == 0 {
            return Err(WavError::InvalidClip("sample rate must be positive".into()));
        }
        if let Some(i) = samples
            .iter()
            .position(|s| !(s.as_f64() >= -1.0 && s.as_f64() <= 1.0))
        {
            return Err(WavError::InvalidClip(format!(
                "sample {i} is outside [-1, 1]"
            )));
        }
        Ok(Self::from_normalized(samples, sample_rate))
    }

    pub(crate) fn from_normalized(samples: Vec<T>, sample_rate: u32) -> Self {
        Self {
            samples,
            sample_rate,
            origin_offset: 0.0,
            source_name: String::new(),
            warnings: Vec::new(),
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.source_name = name.into();
        self
    }

    pub fn with_origin(mut self, seconds: f64) -> Self {
        self.origin_offset = seconds;
        self
    }

    pub(crate) fn with_warnings(mut self, warnings: Vec<ClipWarning>) -> Self {
        self.warnings = warnings;
        self
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    /// Start time of the first sample within the source recording.
    pub fn origin_offset(&self) -> f64 {
        self.origin_offset
    }

    pub fn source_name(&self) -> &str {
        &self.source_name
    }

    pub fn warnings(&self) -> &[ClipWarning] {
        &self.warnings
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_seconds(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn nyquist(&self) -> f64 {
        self.sample_rate as f64 / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_samples() {
        assert!(AudioClip::new(vec![0.0f32, 1.5], 8000).is_err());
        assert!(AudioClip::new(vec![f64::NAN], 8000).is_err());
        assert!(AudioClip::new(vec![0.0f32], 0).is_err());
    }

    #[test]
    fn duration_follows_rate() {
        let clip = AudioClip::new(vec![0.0f64; 4000], 8000).unwrap();
        assert_eq!(clip.duration_seconds(), 0.5);
        assert_eq!(clip.origin_offset(), 0.0);
    }
}
