//! Padding and sampling-rate sweeps over the synthetic trial.
//!
//! Each sweep cell warps one trial in one direction at one padding and yields
//! a row per warped interval. Cells run in parallel; rows come back in grid
//! order. A cell that fails records its error in the `status` column.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Deserialize;
use sincwarp::{
    generate, plan_warp, warp_trial, Partition, SincConfig, SynthSpec, Trial, Window, OFFSET,
    ONSET, TRANSITION,
};

use crate::error::{CliError, Result};
use crate::io::{fmt_f64, fmt_opt};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    ContractT1ExpandT2,
    ExpandT1ContractT2,
}

impl Direction {
    pub const ALL: [Direction; 2] = [Direction::ContractT1ExpandT2, Direction::ExpandT1ContractT2];

    pub fn name(self) -> &'static str {
        match self {
            Direction::ContractT1ExpandT2 => "contract_t1_expand_t2",
            Direction::ExpandT1ContractT2 => "expand_t1_contract_t2",
        }
    }

    /// Target lengths that change `t1` by `magnitude` of its length and give
    /// the difference to `t2`.
    pub fn targets(self, p: &Partition, magnitude: f64) -> sincwarp::Result<(usize, usize)> {
        let t1 = p.t1_len() as f64;
        let scaled = match self {
            Direction::ContractT1ExpandT2 => t1 * (1.0 - magnitude),
            Direction::ExpandT1ContractT2 => t1 * (1.0 + magnitude),
        };
        let span = p.t1_len() + p.t2_len();
        let t1_target = scaled.round();
        if !(t1_target >= 1.0 && t1_target < span as f64) {
            return Err(sincwarp::Error::BadTarget(format!(
                "warp magnitude {magnitude} leaves no room in a span of {span} samples"
            )));
        }
        let t1_target = t1_target as usize;
        Ok((t1_target, span - t1_target))
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Direction::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| format!("unknown direction {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Padding per side as a fraction of the sampling rate.
    pub pad_fractions: Vec<f64>,
    /// Sampling-rate multipliers, descending, in (0, 1].
    pub fsamp_factors: Vec<f64>,
    pub directions: Vec<Direction>,
    /// Fractional change applied to the length of `t1`.
    pub warp_magnitude: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            pad_fractions: vec![0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.25],
            fsamp_factors: vec![1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125],
            directions: Direction::ALL.to_vec(),
            warp_magnitude: 0.2,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CliError::Input(msg));
        if self.pad_fractions.is_empty() {
            return bad("pad_fractions is empty".into());
        }
        if let Some(p) = self
            .pad_fractions
            .iter()
            .find(|p| !(p.is_finite() && **p >= 0.0))
        {
            return bad(format!("pad fraction {p} must be finite and >= 0"));
        }
        if self.fsamp_factors.is_empty() {
            return bad("fsamp_factors is empty".into());
        }
        if let Some(f) = self
            .fsamp_factors
            .iter()
            .find(|f| !(**f > 0.0 && **f <= 1.0))
        {
            return bad(format!("fsamp factor {f} must lie in (0, 1]"));
        }
        if self.fsamp_factors.windows(2).any(|w| w[0] <= w[1]) {
            return bad("fsamp_factors must be strictly descending".into());
        }
        if self.directions.is_empty() {
            return bad("directions is empty".into());
        }
        if (1..self.directions.len()).any(|i| self.directions[..i].contains(&self.directions[i])) {
            return bad("directions must not repeat".into());
        }
        if !(self.warp_magnitude.is_finite() && self.warp_magnitude > 0.0) {
            return bad(format!(
                "warp_magnitude {} must be finite and > 0",
                self.warp_magnitude
            ));
        }
        Ok(())
    }
}

/// Optional overrides read from a TOML config file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfigFile {
    pub pad_fractions: Option<Vec<f64>>,
    pub fsamp_factors: Option<Vec<f64>>,
    pub directions: Option<Vec<Direction>>,
    pub warp_magnitude: Option<f64>,
}

impl SweepConfigFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Input(format!("{origin}: {e}")))
    }

    pub fn apply(self, cfg: &mut SweepConfig) {
        if let Some(v) = self.pad_fractions {
            cfg.pad_fractions = v;
        }
        if let Some(v) = self.fsamp_factors {
            cfg.fsamp_factors = v;
        }
        if let Some(v) = self.directions {
            cfg.directions = v;
        }
        if let Some(v) = self.warp_magnitude {
            cfg.warp_magnitude = v;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowMetrics {
    pub correlation: Option<f64>,
    pub dtw_distance: f64,
    pub dtw_similarity: f64,
    pub energy_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PaddingRow {
    pub direction: Direction,
    pub interval: &'static str,
    pub pad_fraction: f64,
    pub outcome: std::result::Result<RowMetrics, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FsampRow {
    pub fsamp_factor: f64,
    pub row: PaddingRow,
}

fn run_cell(
    trial: &Trial,
    direction: Direction,
    pad_fraction: f64,
    magnitude: f64,
    sinc: &SincConfig,
) -> sincwarp::Result<[RowMetrics; 2]> {
    let p = Partition::from_events(trial, ONSET, TRANSITION, OFFSET)?;
    let (t1, t2) = direction.targets(&p, magnitude)?;
    let spec = plan_warp(&p, t1, t2, pad_fraction, trial.f_samp())?;
    let report = warp_trial(trial, &p, &spec, sinc)?;
    Ok([&report.t1, &report.t2].map(|iv| RowMetrics {
        correlation: iv.correlation,
        dtw_distance: iv.dtw.distance(),
        dtw_similarity: iv.dtw.similarity(),
        energy_ratio: iv.energy_ratio(),
    }))
}

fn cell_rows(
    outcome: sincwarp::Result<[RowMetrics; 2]>,
    direction: Direction,
    pad_fraction: f64,
) -> [PaddingRow; 2] {
    let row = |interval, outcome| PaddingRow {
        direction,
        interval,
        pad_fraction,
        outcome,
    };
    match outcome {
        Ok([a, b]) => [row("t1", Ok(a)), row("t2", Ok(b))],
        Err(e) => [row("t1", Err(e.to_string())), row("t2", Err(e.to_string()))],
    }
}

/// One row per (direction, interval, pad fraction), in that nesting order.
pub fn padding_sweep(trial: &Trial, cfg: &SweepConfig, sinc: &SincConfig) -> Vec<PaddingRow> {
    let cells: Vec<(Direction, f64)> = cfg
        .directions
        .iter()
        .flat_map(|&d| cfg.pad_fractions.iter().map(move |&p| (d, p)))
        .collect();
    let rows: Vec<PaddingRow> = cells
        .par_iter()
        .map(|&(d, pad)| cell_rows(run_cell(trial, d, pad, cfg.warp_magnitude, sinc), d, pad))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    regroup(&cfg.directions, rows)
}

/// Reorder rows from cell order (direction, pad, interval) to
/// (direction, interval, pad).
fn regroup(directions: &[Direction], mut rows: Vec<PaddingRow>) -> Vec<PaddingRow> {
    let rank = |d: &Direction| directions.iter().position(|x| x == d);
    rows.sort_by_key(|r| (rank(&r.direction), r.interval));
    rows
}

/// The padding sweep repeated on the synthetic trial regenerated at each
/// `factor * base.f_samp`.
pub fn fsamp_sweep(base: &SynthSpec, cfg: &SweepConfig, sinc: &SincConfig) -> Vec<FsampRow> {
    cfg.fsamp_factors
        .iter()
        .flat_map(|&factor| {
            let rows = match generate(&base.rescaled(factor)) {
                Ok(trial) => padding_sweep(&trial, cfg, sinc),
                Err(e) => {
                    let mut rows = Vec::new();
                    for &d in &cfg.directions {
                        for &p in &cfg.pad_fractions {
                            rows.extend(cell_rows(Err(e.clone()), d, p));
                        }
                    }
                    regroup(&cfg.directions, rows)
                }
            };
            rows.into_iter().map(move |row| FsampRow {
                fsamp_factor: factor,
                row,
            })
        })
        .collect()
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| fmt_f64(*v))
        .collect::<Vec<_>>()
        .join(",")
}

fn status(outcome: &std::result::Result<RowMetrics, String>) -> String {
    match outcome {
        Ok(_) => "ok".to_string(),
        Err(e) => format!("error: {}", e.replace([',', '\n', '\r'], ";")),
    }
}

/// `# key: value` lines recording everything the table depends on.
pub fn header_lines(
    base: &SynthSpec,
    cfg: &SweepConfig,
    sinc: &SincConfig,
    with_factors: bool,
) -> String {
    let mut lines = vec![
        format!("f_samp: {}", fmt_f64(base.f_samp)),
        format!("f1: {}", fmt_f64(base.f1)),
        format!("f2: {}", fmt_f64(base.f2)),
        format!("duration_s: {}", fmt_f64(base.duration_s)),
        format!("event_fracs: {}", join(&base.event_fracs)),
        format!("amplitudes: {}", join(&base.amplitudes)),
        format!("phases: {}", join(&base.phases)),
        format!("pad_fractions: {}", join(&cfg.pad_fractions)),
    ];
    if with_factors {
        lines.push(format!("fsamp_factors: {}", join(&cfg.fsamp_factors)));
    }
    lines.push(format!(
        "directions: {}",
        cfg.directions
            .iter()
            .map(|d| d.name())
            .collect::<Vec<_>>()
            .join(",")
    ));
    lines.push(format!("warp_magnitude: {}", fmt_f64(cfg.warp_magnitude)));
    let window = match sinc.window {
        Window::Kaiser { beta } => format!("kaiser(beta={})", fmt_f64(beta)),
        Window::Hann => "hann".into(),
        Window::Blackman => "blackman".into(),
    };
    lines.push(format!("window: {window}"));
    lines.push(format!("half_width: {}", sinc.half_width));
    lines.push(format!("anti_alias: {}", sinc.anti_alias));
    lines.iter().map(|l| format!("# {l}\n")).collect()
}

pub const PADDING_COLUMNS: &str =
    "direction,interval,pad_fraction,correlation,dtw_distance,dtw_similarity,energy_ratio,status";
pub const FSAMP_COLUMNS: &str =
    "fsamp_factor,direction,interval,pad_fraction,correlation,dtw_similarity,status";

pub fn render_padding_table(header: &str, rows: &[PaddingRow]) -> String {
    let mut out = String::from(header);
    out.push_str(PADDING_COLUMNS);
    out.push('\n');
    for r in rows {
        let (corr, dist, sim, energy) = match &r.outcome {
            Ok(m) => (
                fmt_opt(m.correlation),
                fmt_f64(m.dtw_distance),
                fmt_f64(m.dtw_similarity),
                fmt_f64(m.energy_ratio),
            ),
            Err(_) => Default::default(),
        };
        out.push_str(&format!(
            "{},{},{},{corr},{dist},{sim},{energy},{}\n",
            r.direction,
            r.interval,
            fmt_f64(r.pad_fraction),
            status(&r.outcome)
        ));
    }
    out
}

pub fn render_fsamp_table(header: &str, rows: &[FsampRow]) -> String {
    let mut out = String::from(header);
    out.push_str(FSAMP_COLUMNS);
    out.push('\n');
    for FsampRow { fsamp_factor, row } in rows {
        let (corr, sim) = match &row.outcome {
            Ok(m) => (fmt_opt(m.correlation), fmt_f64(m.dtw_similarity)),
            Err(_) => Default::default(),
        };
        out.push_str(&format!(
            "{},{},{},{},{corr},{sim},{}\n",
            fmt_f64(*fsamp_factor),
            row.direction,
            row.interval,
            fmt_f64(row.pad_fraction),
            status(&row.outcome)
        ));
    }
    out
}
