//! Event-locked warping of trials.
//!
//! A trial is cut into `pre | t1 | t2 | post` at its onset, transition and
//! offset markers. `t1` and `t2` are padded with their neighbouring samples,
//! resampled to their target lengths and concatenated back between the
//! untouched `pre` and `post` slices.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metrics::{dtw, energy, pearson, DtwResult};
use crate::model::{EventMarker, LengthMode, Partition, Trial, WarpSpec};
use crate::resample::{resample_padded, Padding, SincConfig};

/// Build a warp spec with symmetric padding of `round(pad_fraction * f_samp)`.
pub fn plan_warp(
    p: &Partition,
    t1_target: usize,
    t2_target: usize,
    pad_fraction: f64,
    f_samp: f64,
) -> Result<WarpSpec> {
    plan_warp_with(
        p,
        t1_target,
        t2_target,
        pad_fraction,
        f_samp,
        LengthMode::Preserving,
    )
}

pub fn plan_warp_with(
    p: &Partition,
    t1_target: usize,
    t2_target: usize,
    pad_fraction: f64,
    f_samp: f64,
    mode: LengthMode,
) -> Result<WarpSpec> {
    let pad = pad_samples(pad_fraction, f_samp)?;
    WarpSpec::new(p, t1_target, t2_target, pad, pad, mode)
}

pub fn pad_samples(pad_fraction: f64, f_samp: f64) -> Result<usize> {
    if !(pad_fraction.is_finite() && pad_fraction >= 0.0) {
        return Err(Error::BadTarget(format!(
            "pad fraction must be finite and non-negative, got {pad_fraction}"
        )));
    }
    if !(f_samp.is_finite() && f_samp > 0.0) {
        return Err(Error::BadRate(f_samp));
    }
    Ok((pad_fraction * f_samp).round() as usize)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalReport {
    /// Input length over output length.
    pub ratio: f64,
    /// Against the original interval linearly interpolated onto the output
    /// grid. `None` when either side is constant.
    pub correlation: Option<f64>,
    /// Original interval (rows) against warped interval (columns).
    pub dtw: DtwResult,
    pub energy_in: f64,
    pub energy_out: f64,
}

impl IntervalReport {
    /// `energy_out * ratio / energy_in`; 1 when the warp conserves energy
    /// per unit time.
    pub fn energy_ratio(&self) -> f64 {
        self.energy_out * self.ratio / self.energy_in
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WarpReport {
    pub warped: Trial,
    pub partition: Partition,
    pub t1: IntervalReport,
    pub t2: IntervalReport,
}

/// Warp a trial without computing quality metrics.
pub fn warp_samples(
    t: &Trial,
    p: &Partition,
    spec: &WarpSpec,
    cfg: &SincConfig,
) -> Result<(Trial, Partition)> {
    check_inputs(t, p, spec)?;
    let x = t.samples();
    let padding = Padding::new(spec.pad_left(), spec.pad_right()).with_mode(spec.pad_mode());
    let t1 = resample_padded(x, p.t1(), spec.t1_target(), padding, cfg)?;
    let t2 = resample_padded(x, p.t2(), spec.t2_target(), padding, cfg)?;

    let out_len = p.pre().len() + t1.len() + t2.len() + p.post().len();
    let mut samples = Vec::with_capacity(out_len);
    samples.extend_from_slice(&x[p.pre()]);
    samples.extend_from_slice(&t1);
    samples.extend_from_slice(&t2);
    samples.extend_from_slice(&x[p.post()]);

    let transition = p.onset() + t1.len();
    let offset = transition + t2.len();
    let out_part = Partition::new(out_len, p.onset(), transition, offset)?;
    let events = remap_events(t.events(), p, &out_part);
    Ok((Trial::new(samples, t.f_samp(), events)?, out_part))
}

/// Warp a trial and measure each warped interval against the original.
pub fn warp_trial(
    t: &Trial,
    p: &Partition,
    spec: &WarpSpec,
    cfg: &SincConfig,
) -> Result<WarpReport> {
    let (warped, out_part) = warp_samples(t, p, spec, cfg)?;
    let x = t.samples();
    let y = warped.samples();
    let t1 = interval_report(&x[p.t1()], &y[out_part.t1()])?;
    let t2 = interval_report(&x[p.t2()], &y[out_part.t2()])?;
    Ok(WarpReport {
        warped,
        partition: out_part,
        t1,
        t2,
    })
}

fn check_inputs(t: &Trial, p: &Partition, spec: &WarpSpec) -> Result<()> {
    if p.len() != t.len() {
        return Err(Error::PartitionMismatch {
            partition: p.len(),
            trial: t.len(),
        });
    }
    if spec.t1_len() != p.t1_len() || spec.t2_len() != p.t2_len() {
        return Err(Error::BadTarget(format!(
            "spec was planned for intervals of {}/{} samples, partition has {}/{}",
            spec.t1_len(),
            spec.t2_len(),
            p.t1_len(),
            p.t2_len()
        )));
    }
    Ok(())
}

fn interval_report(original: &[f64], warped: &[f64]) -> Result<IntervalReport> {
    let reference = linear_reference(original, warped.len());
    let correlation = match pearson(warped, &reference) {
        Ok(r) => Some(r),
        Err(Error::ZeroVariance | Error::EmptyInput) => None,
        Err(e) => return Err(e),
    };
    Ok(IntervalReport {
        ratio: original.len() as f64 / warped.len() as f64,
        correlation,
        dtw: dtw(original, warped)?,
        energy_in: energy(original)?,
        energy_out: energy(warped)?,
    })
}

/// Linear interpolation of `x` onto `out_len` points, endpoints to endpoints.
pub fn linear_reference(x: &[f64], out_len: usize) -> Vec<f64> {
    if out_len == 1 || x.len() == 1 {
        return vec![x[0]; out_len];
    }
    let step = (x.len() - 1) as f64 / (out_len - 1) as f64;
    (0..out_len)
        .map(|k| {
            let pos = k as f64 * step;
            let i = (pos.floor() as usize).min(x.len() - 2);
            let frac = pos - i as f64;
            x[i] + frac * (x[i + 1] - x[i])
        })
        .collect()
}

/// Map marker positions through the piecewise-linear time warp.
fn remap_events(events: &[EventMarker], from: &Partition, to: &Partition) -> Vec<EventMarker> {
    let scale = |i: usize, src_start: usize, src_len: usize, dst_start: usize, dst_len: usize| {
        dst_start + ((i - src_start) as f64 * dst_len as f64 / src_len as f64).round() as usize
    };
    let mut out: Vec<EventMarker> = Vec::with_capacity(events.len());
    for e in events {
        let index = if e.index < from.onset() {
            e.index
        } else if e.index < from.transition() {
            scale(
                e.index,
                from.onset(),
                from.t1_len(),
                to.onset(),
                to.t1_len(),
            )
        } else if e.index < from.offset() {
            scale(
                e.index,
                from.transition(),
                from.t2_len(),
                to.transition(),
                to.t2_len(),
            )
        } else {
            e.index - from.offset() + to.offset()
        };
        // interior markers can collide inside a contracted interval
        if out.last().is_some_and(|prev| prev.index >= index) {
            continue;
        }
        out.push(EventMarker::new(index, e.label.clone()));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetPolicy {
    /// Rounded mean interval lengths over the batch.
    MeanLengths,
    FixedTargets(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchOptions {
    pub policy: TargetPolicy,
    pub pad_fraction: f64,
    pub length_mode: LengthMode,
}

/// Warp every trial so that onset, transition and offset land on the same
/// sample indices across the batch.
pub fn align_batch(
    trials: &[(Trial, Partition)],
    opts: &BatchOptions,
    cfg: &SincConfig,
) -> Result<Vec<WarpReport>> {
    let (first, first_p) = trials.first().ok_or(Error::EmptyBatch)?;
    for (t, p) in trials {
        if p.onset() != first_p.onset() {
            return Err(Error::InconsistentTrials(format!(
                "onsets differ ({} vs {})",
                p.onset(),
                first_p.onset()
            )));
        }
        if opts.length_mode == LengthMode::Preserving {
            let span = p.t1_len() + p.t2_len();
            let first_span = first_p.t1_len() + first_p.t2_len();
            if span != first_span {
                return Err(Error::InconsistentTrials(format!(
                    "warped spans differ ({span} vs {first_span} samples)"
                )));
            }
        }
        if t.f_samp() != first.f_samp() {
            return Err(Error::InconsistentTrials(format!(
                "sampling rates differ ({} vs {} Hz)",
                t.f_samp(),
                first.f_samp()
            )));
        }
    }

    let (t1_target, t2_target) = match opts.policy {
        TargetPolicy::FixedTargets(a, b) => (a, b),
        TargetPolicy::MeanLengths => {
            let n = trials.len() as f64;
            let mean1 = trials.iter().map(|(_, p)| p.t1_len()).sum::<usize>() as f64 / n;
            let mean2 = trials.iter().map(|(_, p)| p.t2_len()).sum::<usize>() as f64 / n;
            let t1 = (mean1.round_ties_even() as usize).max(1);
            let mut t2 = (mean2.round_ties_even() as usize).max(1);
            if opts.length_mode == LengthMode::Preserving {
                t2 = (first_p.t1_len() + first_p.t2_len()).saturating_sub(t1);
            }
            (t1, t2)
        }
    };

    trials
        .par_iter()
        .map(|(t, p)| {
            let spec = plan_warp_with(
                p,
                t1_target,
                t2_target,
                opts.pad_fraction,
                t.f_samp(),
                opts.length_mode,
            )?;
            warp_trial(t, p, &spec, cfg)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{OFFSET, ONSET, TRANSITION};
    use crate::synth::{generate, SynthSpec};

    fn short_synth() -> (Trial, Partition) {
        // 2400 samples: t1 = t2 = 600
        let t = generate(&SynthSpec {
            duration_s: 2400.0 / 2048.0,
            ..Default::default()
        })
        .unwrap();
        let p = Partition::from_events(&t, ONSET, TRANSITION, OFFSET).unwrap();
        (t, p)
    }

    fn two_tone(len: usize, events: [usize; 3]) -> (Trial, Partition) {
        let samples = (0..len)
            .map(|n| {
                let t = n as f64 / 2048.0;
                (2.0 * std::f64::consts::PI * 1.7 * t).sin()
                    + 0.5 * (2.0 * std::f64::consts::PI * 3.1 * t).cos()
            })
            .collect();
        let ev = vec![
            EventMarker::new(events[0], ONSET),
            EventMarker::new(events[1], TRANSITION),
            EventMarker::new(events[2], OFFSET),
        ];
        let t = Trial::new(samples, 2048.0, ev).unwrap();
        let p = Partition::from_events(&t, ONSET, TRANSITION, OFFSET).unwrap();
        (t, p)
    }

    #[test]
    fn plan_warp_examples() {
        let p = Partition::new(1400, 100, 700, 1300).unwrap();
        let s = plan_warp(&p, 480, 720, 0.10, 2048.0).unwrap();
        assert_eq!(s.r1(), 1.25);
        assert!((s.r2() - 0.8333333333333334).abs() < 1e-15);
        assert_eq!(s.t1_target() + s.t2_target(), 1200);
        assert_eq!((s.pad_left(), s.pad_right()), (205, 205));

        let s = plan_warp(&p, 600, 600, 0.0, 2048.0).unwrap();
        assert_eq!((s.r1(), s.r2()), (1.0, 1.0));

        assert!(matches!(
            plan_warp(&p, 0, 1200, 0.1, 2048.0),
            Err(Error::BadTarget(_))
        ));
        assert!(matches!(
            plan_warp(&p, 600, 600, -0.1, 2048.0),
            Err(Error::BadTarget(_))
        ));
    }

    #[test]
    fn identity_warp_is_exact() {
        let (t, p) = short_synth();
        for pad in [0.0, 0.001, 0.1, 0.5] {
            let spec = plan_warp(&p, p.t1_len(), p.t2_len(), pad, t.f_samp()).unwrap();
            let r = warp_trial(&t, &p, &spec, &SincConfig::default()).unwrap();
            assert_eq!(r.warped.samples(), t.samples());
            assert_eq!(r.warped.events(), t.events());
            for iv in [&r.t1, &r.t2] {
                assert_eq!(iv.correlation, Some(1.0));
                assert_eq!(iv.dtw.distance(), 0.0);
                assert_eq!(iv.energy_in, iv.energy_out);
            }
        }
    }

    #[test]
    fn contraction_meets_quality_claims() {
        let (t, p) = short_synth();
        let spec = plan_warp(&p, 480, 720, 0.10, t.f_samp()).unwrap();
        let r = warp_trial(&t, &p, &spec, &SincConfig::default()).unwrap();
        for iv in [&r.t1, &r.t2] {
            assert!(iv.correlation.unwrap() >= 0.85);
            assert!(iv.dtw.similarity() >= 0.99);
        }
        assert_eq!(r.warped.len(), t.len());
        let idx: Vec<usize> = r.warped.events().iter().map(|e| e.index).collect();
        assert_eq!(idx, [600, 1080, 1800]);
    }

    #[test]
    fn both_directions_keep_fixed_intervals() {
        let (t, p) = short_synth();
        for (a, b) in [(480, 720), (720, 480)] {
            let spec = plan_warp(&p, a, b, 0.10, t.f_samp()).unwrap();
            let (w, wp) = warp_samples(&t, &p, &spec, &SincConfig::default()).unwrap();
            assert_eq!(w.len(), t.len());
            assert_eq!(&w.samples()[wp.pre()], &t.samples()[p.pre()]);
            assert_eq!(&w.samples()[wp.post()], &t.samples()[p.post()]);
            assert_eq!(wp.t1_len(), a);
            assert_eq!(wp.t2_len(), b);
        }
    }

    #[test]
    fn small_padding_hurts_correlation() {
        let t = generate(&SynthSpec::default()).unwrap();
        let p = Partition::from_events(&t, ONSET, TRANSITION, OFFSET).unwrap();
        let corr = |pad: f64| {
            let spec = plan_warp(&p, 1638, 2458, pad, t.f_samp()).unwrap();
            let r = warp_trial(&t, &p, &spec, &SincConfig::default()).unwrap();
            (r.t1.correlation.unwrap(), r.t2.correlation.unwrap())
        };
        let (lo1, lo2) = corr(0.001);
        let (hi1, hi2) = corr(0.10);
        assert!(hi1 > lo1, "{hi1} vs {lo1}");
        assert!(hi2 > lo2, "{hi2} vs {lo2}");
    }

    #[test]
    fn mismatched_inputs_are_rejected() {
        let (t, p) = short_synth();
        let other = Partition::new(2000, 600, 1200, 1800).unwrap();
        let spec = plan_warp(&other, 600, 600, 0.1, 2048.0).unwrap();
        assert!(matches!(
            warp_samples(&t, &other, &spec, &SincConfig::default()),
            Err(Error::PartitionMismatch { .. })
        ));
        let q = Partition::new(2400, 600, 1000, 1800).unwrap();
        assert!(matches!(
            warp_samples(&t, &q, &spec, &SincConfig::default()),
            Err(Error::BadTarget(_))
        ));
        let _ = p;
    }

    #[test]
    fn linear_reference_endpoints_and_midpoints() {
        let x = [0.0, 2.0, 4.0];
        assert_eq!(linear_reference(&x, 5), vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(linear_reference(&x, 2), vec![0.0, 4.0]);
        assert_eq!(linear_reference(&x, 1), vec![0.0]);
    }

    #[test]
    fn interior_markers_follow_the_warp() {
        let (t, p) = short_synth();
        let mut events = t.events().to_vec();
        events.insert(0, EventMarker::new(100, "cue"));
        events.insert(2, EventMarker::new(900, "mid"));
        events.push(EventMarker::new(2000, "late"));
        let t = Trial::new(t.samples().to_vec(), t.f_samp(), events).unwrap();
        let spec = plan_warp(&p, 480, 720, 0.1, t.f_samp()).unwrap();
        let (w, _) = warp_samples(&t, &p, &spec, &SincConfig::default()).unwrap();
        let got: Vec<(usize, &str)> = w
            .events()
            .iter()
            .map(|e| (e.index, e.label.as_str()))
            .collect();
        assert_eq!(
            got,
            [
                (100, "cue"),
                (600, ONSET),
                (840, "mid"),
                (1080, TRANSITION),
                (1800, OFFSET),
                (2000, "late")
            ]
        );
    }

    #[test]
    fn batch_of_one_is_identity() {
        let (t, p) = short_synth();
        let opts = BatchOptions {
            policy: TargetPolicy::MeanLengths,
            pad_fraction: 0.1,
            length_mode: LengthMode::Preserving,
        };
        let out = align_batch(&[(t.clone(), p)], &opts, &SincConfig::default()).unwrap();
        assert_eq!(out[0].warped.samples(), t.samples());
    }

    #[test]
    fn mean_lengths_align_events() {
        let a = two_tone(1400, [200, 600, 1200]);
        let b = two_tone(1400, [200, 800, 1200]);
        let opts = BatchOptions {
            policy: TargetPolicy::MeanLengths,
            pad_fraction: 0.1,
            length_mode: LengthMode::Preserving,
        };
        let out = align_batch(&[a, b], &opts, &SincConfig::default()).unwrap();
        for r in &out {
            assert_eq!(r.warped.len(), 1400);
            let idx: Vec<usize> = r.warped.events().iter().map(|e| e.index).collect();
            assert_eq!(idx, [200, 700, 1200]);
            assert_eq!((r.partition.t1_len(), r.partition.t2_len()), (500, 500));
        }
    }

    #[test]
    fn mean_lengths_round_half_to_even() {
        // t1 lengths 401 and 402: mean 401.5 rounds to 402
        let a = two_tone(1400, [200, 601, 1200]);
        let b = two_tone(1400, [200, 602, 1200]);
        let opts = BatchOptions {
            policy: TargetPolicy::MeanLengths,
            pad_fraction: 0.05,
            length_mode: LengthMode::Preserving,
        };
        let out = align_batch(&[a, b], &opts, &SincConfig::default()).unwrap();
        for r in &out {
            assert_eq!((r.partition.t1_len(), r.partition.t2_len()), (402, 598));
        }
    }

    #[test]
    fn fixed_targets_match_single_warp() {
        let (t, p) = short_synth();
        let opts = BatchOptions {
            policy: TargetPolicy::FixedTargets(480, 720),
            pad_fraction: 0.1,
            length_mode: LengthMode::Preserving,
        };
        let batch = align_batch(&[(t.clone(), p)], &opts, &SincConfig::default()).unwrap();
        let spec = plan_warp(&p, 480, 720, 0.1, t.f_samp()).unwrap();
        let single = warp_trial(&t, &p, &spec, &SincConfig::default()).unwrap();
        assert_eq!(batch[0], single);
    }

    #[test]
    fn batch_errors() {
        let opts = BatchOptions {
            policy: TargetPolicy::MeanLengths,
            pad_fraction: 0.1,
            length_mode: LengthMode::Preserving,
        };
        assert_eq!(
            align_batch(&[], &opts, &SincConfig::default()),
            Err(Error::EmptyBatch)
        );
        let a = two_tone(1400, [200, 600, 1200]);
        let b = two_tone(1400, [200, 600, 1100]);
        assert!(matches!(
            align_batch(&[a.clone(), b.clone()], &opts, &SincConfig::default()),
            Err(Error::InconsistentTrials(_))
        ));
        let free = BatchOptions {
            length_mode: LengthMode::Free,
            ..opts
        };
        let out = align_batch(&[a.clone(), b], &free, &SincConfig::default()).unwrap();
        let ev0: Vec<usize> = out[0].warped.events().iter().map(|e| e.index).collect();
        let ev1: Vec<usize> = out[1].warped.events().iter().map(|e| e.index).collect();
        assert_eq!(ev0, ev1);
        let c = two_tone(1400, [300, 600, 1200]);
        assert!(matches!(
            align_batch(&[a, c], &opts, &SincConfig::default()),
            Err(Error::InconsistentTrials(_))
        ));
    }
}
