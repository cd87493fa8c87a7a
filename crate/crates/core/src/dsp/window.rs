use serde::{Deserialize, Serialize};

use crate::scalar::Sample;

use super::DspError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowShape {
    #[default]
    Hann,
}

impl WindowShape {
    pub fn coefficients<T: Sample>(self, n: usize) -> Result<Vec<T>, DspError> {
        match self {
            WindowShape::Hann => hann_window(n),
        }
    }
}

/// STFT framing parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WindowSpec {
    pub window_size: usize,
    pub hop_size: usize,
    #[serde(default)]
    pub shape: WindowShape,
}

impl Default for WindowSpec {
    /// 2048-sample Hann window with a 1024-sample hop (50% overlap).
    fn default() -> Self {
        Self {
            window_size: 2048,
            hop_size: 1024,
            shape: WindowShape::Hann,
        }
    }
}

impl WindowSpec {
    pub fn new(window_size: usize, hop_size: usize) -> Result<Self, DspError> {
        let spec = Self {
            window_size,
            hop_size,
            shape: WindowShape::Hann,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), DspError> {
        if self.window_size < 2 || !self.window_size.is_power_of_two() {
            return Err(DspError::InvalidWindowSpec(format!(
                "window size {} is not a power of two >= 2",
                self.window_size
            )));
        }
        if self.hop_size == 0 || self.hop_size > self.window_size {
            return Err(DspError::InvalidWindowSpec(format!(
                "hop size {} must be in 1..={}",
                self.hop_size, self.window_size
            )));
        }
        Ok(())
    }

    /// Retained bins per frame, DC through Nyquist inclusive.
    pub fn bin_count(&self) -> usize {
        self.window_size / 2 + 1
    }
}

/// Periodic Hann window: `w[i] = 0.5 * (1 - cos(2*pi*i/n))`.
///
/// The periodic form sums to a constant under 50% overlap-add, which the
/// symmetric form does not.
pub fn hann_window<T: Sample>(n: usize) -> Result<Vec<T>, DspError> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(DspError::InvalidSize(n));
    }
    let step = 2.0 * std::f64::consts::PI / n as f64;
    Ok((0..n)
        .map(|i| T::of(0.5 * (1.0 - (step * i as f64).cos())))
        .collect())
}
