use serde::{Deserialize, Serialize};

use super::VizError;

/// Closed numeric interval with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, VizError> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(VizError::InvalidRange(format!(
                "[{lo}, {hi}] is not an increasing finite interval"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn span(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }

    /// Intersection, or `None` when it has no interior.
    pub fn intersect(&self, lo: f64, hi: f64) -> Option<Self> {
        let a = self.lo.max(lo);
        let b = self.hi.min(hi);
        (a < b).then_some(Self { lo: a, hi: b })
    }

    fn is_valid(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi
    }
}

/// Time, amplitude and frequency window of a view.
///
/// The amplitude axis only zooms the drawing viewport; it never rescales or
/// clips sample values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViewRange {
    pub time: Interval,
    pub amplitude: Interval,
    pub frequency: Interval,
}

impl ViewRange {
    pub fn new(time: Interval, amplitude: Interval, frequency: Interval) -> Result<Self, VizError> {
        let r = Self {
            time,
            amplitude,
            frequency,
        };
        r.validate()?;
        Ok(r)
    }

    /// Everything: `[0, duration]` s, `[-1, 1]`, `[0, nyquist]` Hz.
    pub fn full(duration: f64, nyquist: f64) -> Self {
        Self {
            time: Interval {
                lo: 0.0,
                hi: duration,
            },
            amplitude: Interval { lo: -1.0, hi: 1.0 },
            frequency: Interval {
                lo: 0.0,
                hi: nyquist,
            },
        }
    }

    /// Check ordering on every axis plus the clip-independent bounds.
    pub fn validate(&self) -> Result<(), VizError> {
        for (name, iv) in [
            ("time", self.time),
            ("amplitude", self.amplitude),
            ("frequency", self.frequency),
        ] {
            if !iv.is_valid() {
                return Err(VizError::InvalidRange(format!(
                    "{name} [{}, {}] is not an increasing finite interval",
                    iv.lo, iv.hi
                )));
            }
        }
        if self.time.lo < 0.0 {
            return Err(VizError::InvalidRange("time starts before 0".into()));
        }
        if self.amplitude.lo < -1.0 || self.amplitude.hi > 1.0 {
            return Err(VizError::InvalidRange("amplitude outside [-1, 1]".into()));
        }
        if self.frequency.lo < 0.0 {
            return Err(VizError::InvalidRange("negative frequency".into()));
        }
        Ok(())
    }

    /// Intersect with a clip's extent. Fails with `EmptyResult` if any axis
    /// loses its interior.
    pub fn clamp_to(&self, duration: f64, nyquist: f64) -> Result<Self, VizError> {
        let axis = |iv: Interval, lo: f64, hi: f64, name: &str| {
            iv.intersect(lo, hi)
                .ok_or_else(|| VizError::EmptyResult(format!("{name} range misses the clip")))
        };
        Ok(Self {
            time: axis(self.time, 0.0, duration, "time")?,
            amplitude: axis(self.amplitude, -1.0, 1.0, "amplitude")?,
            frequency: axis(self.frequency, 0.0, nyquist, "frequency")?,
        })
    }

    /// True when this range satisfies every invariant for a clip of the given
    /// extent.
    pub fn fits(&self, duration: f64, nyquist: f64) -> bool {
        self.validate().is_ok() && self.time.hi <= duration && self.frequency.hi <= nyquist
    }
}
