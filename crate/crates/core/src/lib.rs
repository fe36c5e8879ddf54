//! Event-locked alignment of variable-length trials.
//!
//! Trials are partitioned at onset, transition and offset markers; the two
//! intervals between them are resampled with a windowed-sinc interpolator to
//! common target lengths while the surrounding samples are copied verbatim.
//! The [`metrics`] module measures how closely the warped intervals follow
//! the originals.

pub mod align;
pub mod error;
pub mod metrics;
pub mod model;
pub mod resample;
pub mod synth;

pub use align::{
    align_batch, plan_warp, plan_warp_with, warp_samples, warp_trial, BatchOptions, IntervalReport,
    TargetPolicy, WarpReport,
};
pub use error::{Error, Result};
pub use metrics::{dtw, dtw_distance, energy, pearson, power, DtwResult};
pub use model::{
    partition_from_events, validate_trial, EventMarker, IntervalWarp, LengthMode, PadMode,
    Partition, Trial, WarpSpec, OFFSET, ONSET, TRANSITION,
};
pub use resample::{resample, resample_padded, Padding, SincConfig, Window};
pub use synth::{generate, SynthSpec};
