use std::ops::Range;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("signal is empty")]
    EmptySignal,
    #[error("non-finite sample {value} at index {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("sampling frequency must be finite and positive, got {0}")]
    BadRate(f64),
    #[error("bad event markers: {0}")]
    BadEvents(String),

    #[error("no event labelled {0:?}")]
    MissingEvent(String),
    #[error("more than one event labelled {0:?}")]
    DuplicateEvent(String),
    #[error("degenerate interval: onset={onset}, transition={transition}, offset={offset}")]
    DegenerateInterval {
        onset: usize,
        transition: usize,
        offset: usize,
    },
    #[error("partition covers {partition} samples but the trial has {trial}")]
    PartitionMismatch { partition: usize, trial: usize },

    #[error("segment of length {0} is too short to resample (need at least 2)")]
    SegmentTooShort(usize),
    #[error("output length must be at least 1")]
    BadOutputLength,
    #[error("range {range:?} is out of bounds for a signal of length {len}")]
    RangeOutOfBounds { range: Range<usize>, len: usize },
    #[error("invalid resampler configuration: {0}")]
    BadConfig(String),

    #[error("invalid warp target: {0}")]
    BadTarget(String),
    #[error("batch is empty")]
    EmptyBatch,
    #[error("inconsistent trials in batch: {0}")]
    InconsistentTrials(String),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("input has zero variance")]
    ZeroVariance,
    #[error("input is empty")]
    EmptyInput,

    #[error("frequency {freq} Hz is not below the Nyquist frequency {nyquist} Hz")]
    NyquistViolation { freq: f64, nyquist: f64 },
    #[error("event fractions must lie in (0, 1) and be strictly increasing, got {0:?}")]
    BadEventFracs([f64; 3]),
    #[error("duration must be finite and positive, got {0}")]
    BadDuration(f64),
}
