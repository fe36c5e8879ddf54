//! Trials, event markers and the interval partition used by the warp.

use std::ops::Range;

use crate::error::{Error, Result};

pub const ONSET: &str = "onset";
pub const TRANSITION: &str = "transition";
pub const OFFSET: &str = "offset";

/// A labelled sample position inside a trial.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EventMarker {
    pub index: usize,
    pub label: String,
}

impl EventMarker {
    pub fn new(index: usize, label: impl Into<String>) -> Self {
        Self {
            index,
            label: label.into(),
        }
    }

    /// Convert a time in seconds to the nearest sample. Exact half-sample
    /// ties go to the earlier sample.
    pub fn from_seconds(seconds: f64, f_samp: f64, label: impl Into<String>) -> Result<Self> {
        if !(f_samp.is_finite() && f_samp > 0.0) {
            return Err(Error::BadRate(f_samp));
        }
        let pos = seconds * f_samp;
        if !pos.is_finite() || pos < -0.5 {
            return Err(Error::BadEvents(format!(
                "event time {seconds} s does not map to a sample"
            )));
        }
        let index = (pos - 0.5).ceil().max(0.0) as usize;
        Ok(Self::new(index, label))
    }
}

/// A uniformly sampled, single-channel trial with ordered event markers.
///
/// Markers may sit at `len()` as an end-of-signal fencepost so that an
/// offset can coincide with the end of the recording.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    samples: Vec<f64>,
    f_samp: f64,
    events: Vec<EventMarker>,
}

impl Trial {
    pub fn new(samples: Vec<f64>, f_samp: f64, events: Vec<EventMarker>) -> Result<Self> {
        validate_parts(&samples, f_samp, &events)?;
        Ok(Self {
            samples,
            f_samp,
            events,
        })
    }

    /// Re-check every invariant. Always succeeds for values built by
    /// [`Trial::new`]; kept for callers that want an explicit gate.
    pub fn validate(self) -> Result<Self> {
        validate_parts(&self.samples, self.f_samp, &self.events)?;
        Ok(self)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn f_samp(&self) -> f64 {
        self.f_samp
    }

    pub fn f_nyq(&self) -> f64 {
        self.f_samp / 2.0
    }

    pub fn events(&self) -> &[EventMarker] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.f_samp
    }

    /// The unique marker with `label`.
    pub fn event(&self, label: &str) -> Result<&EventMarker> {
        let mut found = self.events.iter().filter(|e| e.label == label);
        let first = found
            .next()
            .ok_or_else(|| Error::MissingEvent(label.to_string()))?;
        if found.next().is_some() {
            return Err(Error::DuplicateEvent(label.to_string()));
        }
        Ok(first)
    }

    pub fn into_parts(self) -> (Vec<f64>, f64, Vec<EventMarker>) {
        (self.samples, self.f_samp, self.events)
    }
}

pub fn validate_trial(t: Trial) -> Result<Trial> {
    t.validate()
}

fn validate_parts(samples: &[f64], f_samp: f64, events: &[EventMarker]) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::EmptySignal);
    }
    if let Some((index, &value)) = samples.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { index, value });
    }
    if !(f_samp.is_finite() && f_samp > 0.0) {
        return Err(Error::BadRate(f_samp));
    }
    for e in events {
        if e.index > samples.len() {
            return Err(Error::BadEvents(format!(
                "{:?} at {} is outside a signal of length {}",
                e.label,
                e.index,
                samples.len()
            )));
        }
    }
    for w in events.windows(2) {
        if w[0].index >= w[1].index {
            return Err(Error::BadEvents(format!(
                "{:?} at {} does not precede {:?} at {}",
                w[0].label, w[0].index, w[1].label, w[1].index
            )));
        }
    }
    Ok(())
}

/// Split of a trial into `pre | t1 | t2 | post` at sample indices
/// `onset <= transition <= offset`. The transition sample belongs to `t2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Partition {
    onset: usize,
    transition: usize,
    offset: usize,
    len: usize,
}

impl Partition {
    pub fn new(len: usize, onset: usize, transition: usize, offset: usize) -> Result<Self> {
        if onset >= transition || transition >= offset {
            return Err(Error::DegenerateInterval {
                onset,
                transition,
                offset,
            });
        }
        if offset > len {
            return Err(Error::RangeOutOfBounds {
                range: onset..offset,
                len,
            });
        }
        Ok(Self {
            onset,
            transition,
            offset,
            len,
        })
    }

    pub fn from_events(
        t: &Trial,
        onset_label: &str,
        transition_label: &str,
        offset_label: &str,
    ) -> Result<Self> {
        let onset = t.event(onset_label)?.index;
        let transition = t.event(transition_label)?.index;
        let offset = t.event(offset_label)?.index;
        Self::new(t.len(), onset, transition, offset)
    }

    pub fn pre(&self) -> Range<usize> {
        0..self.onset
    }

    pub fn t1(&self) -> Range<usize> {
        self.onset..self.transition
    }

    pub fn t2(&self) -> Range<usize> {
        self.transition..self.offset
    }

    pub fn post(&self) -> Range<usize> {
        self.offset..self.len
    }

    pub fn onset(&self) -> usize {
        self.onset
    }

    pub fn transition(&self) -> usize {
        self.transition
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn t1_len(&self) -> usize {
        self.transition - self.onset
    }

    pub fn t2_len(&self) -> usize {
        self.offset - self.transition
    }

    pub fn ranges(&self) -> [Range<usize>; 4] {
        [self.pre(), self.t1(), self.t2(), self.post()]
    }
}

/// Partition a trial at its `onset`, `transition` and `offset` markers.
pub fn partition_from_events(
    t: &Trial,
    onset_label: &str,
    transition_label: &str,
    offset_label: &str,
) -> Result<Partition> {
    Partition::from_events(t, onset_label, transition_label, offset_label)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LengthMode {
    /// `t1_target + t2_target` must equal `len(t1) + len(t2)`.
    #[default]
    Preserving,
    Free,
}

/// Where padding samples come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PadMode {
    /// True neighbouring samples, edge-replicated past the trial boundary.
    #[default]
    Adjacent,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntervalWarp {
    Contract,
    Expand,
    Identity,
}

/// Target lengths and padding for the two warpable intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpSpec {
    t1_len: usize,
    t2_len: usize,
    t1_target: usize,
    t2_target: usize,
    pad_left: usize,
    pad_right: usize,
    length_mode: LengthMode,
    pad_mode: PadMode,
}

impl WarpSpec {
    pub fn new(
        p: &Partition,
        t1_target: usize,
        t2_target: usize,
        pad_left: usize,
        pad_right: usize,
        length_mode: LengthMode,
    ) -> Result<Self> {
        if t1_target == 0 || t2_target == 0 {
            return Err(Error::BadTarget(format!(
                "targets must be positive, got {t1_target}/{t2_target}"
            )));
        }
        if length_mode == LengthMode::Preserving && t1_target + t2_target != p.t1_len() + p.t2_len()
        {
            return Err(Error::BadTarget(format!(
                "targets {t1_target}+{t2_target} do not preserve the warped span of {} samples",
                p.t1_len() + p.t2_len()
            )));
        }
        Ok(Self {
            t1_len: p.t1_len(),
            t2_len: p.t2_len(),
            t1_target,
            t2_target,
            pad_left,
            pad_right,
            length_mode,
            pad_mode: PadMode::Adjacent,
        })
    }

    pub fn with_pad_mode(mut self, mode: PadMode) -> Self {
        self.pad_mode = mode;
        self
    }

    pub fn t1_target(&self) -> usize {
        self.t1_target
    }

    pub fn t2_target(&self) -> usize {
        self.t2_target
    }

    pub fn t1_len(&self) -> usize {
        self.t1_len
    }

    pub fn t2_len(&self) -> usize {
        self.t2_len
    }

    pub fn pad_left(&self) -> usize {
        self.pad_left
    }

    pub fn pad_right(&self) -> usize {
        self.pad_right
    }

    pub fn length_mode(&self) -> LengthMode {
        self.length_mode
    }

    pub fn pad_mode(&self) -> PadMode {
        self.pad_mode
    }

    /// `len(t1) / t1_target`; above 1 contracts, below 1 expands.
    pub fn r1(&self) -> f64 {
        self.t1_len as f64 / self.t1_target as f64
    }

    pub fn r2(&self) -> f64 {
        self.t2_len as f64 / self.t2_target as f64
    }

    pub fn t1_warp(&self) -> IntervalWarp {
        classify(self.t1_len, self.t1_target)
    }

    pub fn t2_warp(&self) -> IntervalWarp {
        classify(self.t2_len, self.t2_target)
    }
}

fn classify(len: usize, target: usize) -> IntervalWarp {
    match len.cmp(&target) {
        std::cmp::Ordering::Greater => IntervalWarp::Contract,
        std::cmp::Ordering::Less => IntervalWarp::Expand,
        std::cmp::Ordering::Equal => IntervalWarp::Identity,
    }
}
