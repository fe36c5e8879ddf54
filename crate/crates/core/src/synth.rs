//! Deterministic two-tone demonstration trial.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{EventMarker, Trial, OFFSET, ONSET, TRANSITION};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub f_samp: f64,
    pub f1: f64,
    pub f2: f64,
    pub duration_s: f64,
    /// Onset, transition and offset as fractions of the trial length.
    pub event_fracs: [f64; 3],
    pub amplitudes: [f64; 2],
    pub phases: [f64; 2],
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            f_samp: 2048.0,
            f1: 5.0 / PI,
            f2: 5.0 / 2.0,
            duration_s: 4.0,
            event_fracs: [0.25, 0.5, 0.75],
            amplitudes: [1.0, 1.0],
            phases: [0.0, 0.0],
        }
    }
}

impl SynthSpec {
    /// The same signal sampled at `factor * f_samp`.
    pub fn rescaled(&self, factor: f64) -> Self {
        Self {
            f_samp: self.f_samp * factor,
            ..*self
        }
    }

    pub fn len(&self) -> usize {
        (self.duration_s * self.f_samp).round() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Underlying continuous signal at time `t` seconds.
    pub fn value_at(&self, t: f64) -> f64 {
        self.amplitudes[0] * (2.0 * PI * self.f1 * t + self.phases[0]).sin()
            + self.amplitudes[1] * (2.0 * PI * self.f2 * t + self.phases[1]).sin()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f_samp.is_finite() && self.f_samp > 0.0) {
            return Err(Error::BadRate(self.f_samp));
        }
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) || self.is_empty() {
            return Err(Error::BadDuration(self.duration_s));
        }
        let nyquist = self.f_samp / 2.0;
        for freq in [self.f1, self.f2] {
            if !(freq.is_finite() && freq.abs() < nyquist) {
                return Err(Error::NyquistViolation { freq, nyquist });
            }
        }
        let [a, b, c] = self.event_fracs;
        if !(0.0 < a && a < b && b < c && c < 1.0) {
            return Err(Error::BadEventFracs(self.event_fracs));
        }
        Ok(())
    }
}

/// Sample the two-tone signal and place onset, transition and offset markers.
pub fn generate(spec: &SynthSpec) -> Result<Trial> {
    spec.validate()?;
    let len = spec.len();
    // n / f_samp keeps sample times bitwise shared across power-of-two rates
    let samples: Vec<f64> = (0..len)
        .map(|n| spec.value_at(n as f64 / spec.f_samp))
        .collect();
    let idx = spec.event_fracs.map(|f| (f * len as f64).round() as usize);
    if !(idx[0] < idx[1] && idx[1] < idx[2] && idx[2] <= len) {
        return Err(Error::BadEventFracs(spec.event_fracs));
    }
    let events = vec![
        EventMarker::new(idx[0], ONSET),
        EventMarker::new(idx[1], TRANSITION),
        EventMarker::new(idx[2], OFFSET),
    ];
    Trial::new(samples, spec.f_samp, events)
}
