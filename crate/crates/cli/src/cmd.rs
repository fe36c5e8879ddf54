//! Subcommand definitions and dispatch.

use std::ffi::OsString;
use std::ops::Range;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use sincwarp::{
    generate, plan_warp_with, warp_trial, EventMarker, LengthMode, PadMode, Partition, SincConfig,
    SynthSpec, Window, OFFSET, ONSET, TRANSITION,
};

use crate::error::{CliError, Result};
use crate::io::{self, fmt_f64, fmt_opt};
use crate::sweep::{self, Direction, SweepConfig, SweepConfigFile};

#[derive(Debug, Parser)]
#[command(
    name = "sincwarp",
    version,
    about = "Time-lock trials by piecewise windowed-sinc resampling"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the two-tone synthetic trial and its events sidecar
    Synth(SynthArgs),
    /// Warp the two event-bounded intervals of a trial to new lengths
    Warp(WarpArgs),
    /// Tabulate warp quality against padding on the synthetic trial
    SweepPadding(SweepArgs),
    /// Repeat the padding sweep at reduced sampling rates
    SweepFsamp(SweepArgs),
    /// Write the DTW accumulated-cost matrix and warping path of two signals
    DtwMatrix(DtwArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WindowKind {
    Kaiser,
    Hann,
    Blackman,
}

#[derive(Debug, Clone, Args)]
pub struct ResamplerArgs {
    /// Window applied to the sinc kernel
    #[arg(long, value_enum, default_value_t = WindowKind::Kaiser)]
    pub window: WindowKind,
    /// Kaiser window shape parameter
    #[arg(long, default_value_t = 14.0)]
    pub beta: f64,
    /// Kernel half-width in input samples
    #[arg(long, default_value_t = 32)]
    pub half_width: usize,
    /// Keep the input cutoff when contracting
    #[arg(long)]
    pub no_anti_alias: bool,
}

impl ResamplerArgs {
    pub fn config(&self) -> SincConfig {
        SincConfig {
            half_width: self.half_width,
            window: match self.window {
                WindowKind::Kaiser => Window::Kaiser { beta: self.beta },
                WindowKind::Hann => Window::Hann,
                WindowKind::Blackman => Window::Blackman,
            },
            anti_alias: !self.no_anti_alias,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SignalArgs {
    /// Sampling frequency in Hz
    #[arg(long)]
    pub f_samp: Option<f64>,
    /// Trial duration in seconds
    #[arg(long)]
    pub duration: Option<f64>,
}

impl SignalArgs {
    fn apply(&self, spec: &mut SynthSpec) {
        if let Some(v) = self.f_samp {
            spec.f_samp = v;
        }
        if let Some(v) = self.duration {
            spec.duration_s = v;
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub signal: SignalArgs,
    /// First tone in Hz [default: 5/pi]
    #[arg(long)]
    pub f1: Option<f64>,
    /// Second tone in Hz [default: 2.5]
    #[arg(long)]
    pub f2: Option<f64>,
    /// Onset, transition and offset as fractions of the trial length
    #[arg(long, value_delimiter = ',', num_args = 3)]
    pub event_fracs: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pub amplitudes: Option<Vec<f64>>,
    /// Phases in radians
    #[arg(
        long,
        value_delimiter = ',',
        num_args = 2,
        allow_negative_numbers = true
    )]
    pub phases: Option<Vec<f64>>,
    /// Trial file to write
    #[arg(short, long)]
    pub output: PathBuf,
    /// Events sidecar [default: OUTPUT with extension .events.json]
    #[arg(long)]
    pub events: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct WarpArgs {
    /// Trial file to warp
    #[arg(short, long)]
    pub input: PathBuf,
    /// Events sidecar [default: INPUT with extension .events.json]
    #[arg(long, conflicts_with_all = ["onset", "transition", "offset"])]
    pub events: Option<PathBuf>,
    #[arg(long, requires_all = ["transition", "offset"])]
    pub onset: Option<usize>,
    #[arg(long, requires_all = ["onset", "offset"])]
    pub transition: Option<usize>,
    #[arg(long, requires_all = ["onset", "transition"])]
    pub offset: Option<usize>,
    /// Output length of the onset-to-transition interval
    #[arg(long)]
    pub t1_target: usize,
    /// Output length of the transition-to-offset interval
    #[arg(long)]
    pub t2_target: usize,
    /// Padding per side as a fraction of the sampling rate
    #[arg(long, default_value_t = 0.1)]
    pub pad_fraction: f64,
    /// Pad with zeros instead of neighbouring samples
    #[arg(long)]
    pub zero_pad: bool,
    /// Allow targets that change the total trial length
    #[arg(long)]
    pub allow_length_change: bool,
    #[command(flatten)]
    pub resampler: ResamplerArgs,
    /// Warped trial file to write
    #[arg(short, long)]
    pub output: PathBuf,
    /// Per-interval report [default: OUTPUT with extension .report.csv]
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// TOML file with any of pad_fractions, fsamp_factors, directions,
    /// warp_magnitude; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub pad_fractions: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub fsamp_factors: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub directions: Option<Vec<Direction>>,
    #[arg(long)]
    pub warp_magnitude: Option<f64>,
    #[command(flatten)]
    pub signal: SignalArgs,
    #[command(flatten)]
    pub resampler: ResamplerArgs,
    /// Table to write
    #[arg(short, long)]
    pub output: PathBuf,
}

impl SweepArgs {
    fn sweep_config(&self) -> Result<SweepConfig> {
        let mut cfg = SweepConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
            SweepConfigFile::parse(&text, &path.display().to_string())?.apply(&mut cfg);
        }
        if let Some(v) = &self.pad_fractions {
            cfg.pad_fractions = v.clone();
        }
        if let Some(v) = &self.fsamp_factors {
            cfg.fsamp_factors = v.clone();
        }
        if let Some(v) = &self.directions {
            cfg.directions = v.clone();
        }
        if let Some(v) = self.warp_magnitude {
            cfg.warp_magnitude = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct DtwArgs {
    /// First signal (matrix rows)
    #[arg(short, long)]
    pub a: PathBuf,
    /// Second signal (matrix columns)
    #[arg(short, long)]
    pub b: PathBuf,
    /// Restrict the first signal to samples START:END
    #[arg(long, value_parser = parse_range)]
    pub range_a: Option<Range<usize>>,
    /// Restrict the second signal to samples START:END
    #[arg(long, value_parser = parse_range)]
    pub range_b: Option<Range<usize>>,
    /// Cost matrix file to write
    #[arg(short, long)]
    pub output: PathBuf,
    /// Warping path file [default: OUTPUT with extension .path.csv]
    #[arg(long)]
    pub path_output: Option<PathBuf>,
}

fn parse_range(s: &str) -> std::result::Result<Range<usize>, String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected START:END, got {s:?}"))?;
    let start = a.trim().parse::<usize>().map_err(|e| e.to_string())?;
    let end = b.trim().parse::<usize>().map_err(|e| e.to_string())?;
    if start >= end {
        return Err(format!("empty range {s:?}"));
    }
    Ok(start..end)
}

/// Parse arguments, run, report errors on stderr and return the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Synth(a) => cmd_synth(&a),
        Command::Warp(a) => cmd_warp(&a),
        Command::SweepPadding(a) => cmd_sweep_padding(&a),
        Command::SweepFsamp(a) => cmd_sweep_fsamp(&a),
        Command::DtwMatrix(a) => cmd_dtw_matrix(&a),
    }
}

fn synth_meta(spec: &SynthSpec) -> Vec<(String, String)> {
    let pair = |v: [f64; 2]| format!("{},{}", fmt_f64(v[0]), fmt_f64(v[1]));
    vec![
        ("f1".into(), fmt_f64(spec.f1)),
        ("f2".into(), fmt_f64(spec.f2)),
        ("duration_s".into(), fmt_f64(spec.duration_s)),
        (
            "event_fracs".into(),
            spec.event_fracs.map(fmt_f64).join(","),
        ),
        ("amplitudes".into(), pair(spec.amplitudes)),
        ("phases".into(), pair(spec.phases)),
    ]
}

pub fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let mut spec = SynthSpec::default();
    a.signal.apply(&mut spec);
    if let Some(v) = a.f1 {
        spec.f1 = v;
    }
    if let Some(v) = a.f2 {
        spec.f2 = v;
    }
    if let Some(v) = &a.event_fracs {
        spec.event_fracs = [v[0], v[1], v[2]];
    }
    if let Some(v) = &a.amplitudes {
        spec.amplitudes = [v[0], v[1]];
    }
    if let Some(v) = &a.phases {
        spec.phases = [v[0], v[1]];
    }
    let trial = generate(&spec)?;
    io::write_trial(&a.output, &trial, &synth_meta(&spec))?;
    let events_path = a
        .events
        .clone()
        .unwrap_or_else(|| io::sidecar_path(&a.output));
    io::write_events(&events_path, trial.events())
}

pub const REPORT_COLUMNS: &str = "interval,warp,length_in,length_out,ratio,correlation,dtw_distance,dtw_normalized,dtw_similarity,energy_in,energy_out,energy_ratio";

pub fn cmd_warp(a: &WarpArgs) -> Result<()> {
    let events = match (a.onset, a.transition, a.offset) {
        (Some(on), Some(tr), Some(off)) => vec![
            EventMarker::new(on, ONSET),
            EventMarker::new(tr, TRANSITION),
            EventMarker::new(off, OFFSET),
        ],
        _ => {
            let path = a
                .events
                .clone()
                .unwrap_or_else(|| io::sidecar_path(&a.input));
            io::read_events(&path)?
        }
    };
    let file = io::read_samples(&a.input)?;
    let trial = sincwarp::Trial::new(file.samples, file.f_samp, events)?;
    let p = Partition::from_events(&trial, ONSET, TRANSITION, OFFSET)?;
    let mode = if a.allow_length_change {
        LengthMode::Free
    } else {
        LengthMode::Preserving
    };
    let mut spec = plan_warp_with(
        &p,
        a.t1_target,
        a.t2_target,
        a.pad_fraction,
        trial.f_samp(),
        mode,
    )?;
    if a.zero_pad {
        spec = spec.with_pad_mode(PadMode::Zero);
    }
    let report = warp_trial(&trial, &p, &spec, &a.resampler.config())?;

    io::write_trial(&a.output, &report.warped, &[])?;
    io::write_events(&io::sidecar_path(&a.output), report.warped.events())?;

    let mut text = format!(
        "# pad_left: {}\n# pad_right: {}\n{REPORT_COLUMNS}\n",
        spec.pad_left(),
        spec.pad_right()
    );
    for (name, warp, len_in, len_out, iv) in [
        (
            "t1",
            spec.t1_warp(),
            p.t1_len(),
            spec.t1_target(),
            &report.t1,
        ),
        (
            "t2",
            spec.t2_warp(),
            p.t2_len(),
            spec.t2_target(),
            &report.t2,
        ),
    ] {
        let warp = match warp {
            sincwarp::IntervalWarp::Contract => "contract",
            sincwarp::IntervalWarp::Expand => "expand",
            sincwarp::IntervalWarp::Identity => "identity",
        };
        text.push_str(&format!(
            "{name},{warp},{len_in},{len_out},{},{},{},{},{},{},{},{}\n",
            fmt_f64(iv.ratio),
            fmt_opt(iv.correlation),
            fmt_f64(iv.dtw.distance()),
            fmt_f64(iv.dtw.normalized_distance()),
            fmt_f64(iv.dtw.similarity()),
            fmt_f64(iv.energy_in),
            fmt_f64(iv.energy_out),
            fmt_f64(iv.energy_ratio()),
        ));
    }
    let report_path = a
        .report
        .clone()
        .unwrap_or_else(|| a.output.with_extension("report.csv"));
    io::write_text(&report_path, &text)
}

fn base_spec(signal: &SignalArgs) -> SynthSpec {
    let mut spec = SynthSpec::default();
    signal.apply(&mut spec);
    spec
}

pub fn cmd_sweep_padding(a: &SweepArgs) -> Result<()> {
    let cfg = a.sweep_config()?;
    let spec = base_spec(&a.signal);
    let sinc = a.resampler.config();
    sinc.validate()?;
    let trial = generate(&spec)?;
    let rows = sweep::padding_sweep(&trial, &cfg, &sinc);
    let header = sweep::header_lines(&spec, &cfg, &sinc, false);
    io::write_text(&a.output, &sweep::render_padding_table(&header, &rows))
}

pub fn cmd_sweep_fsamp(a: &SweepArgs) -> Result<()> {
    let cfg = a.sweep_config()?;
    let spec = base_spec(&a.signal);
    let sinc = a.resampler.config();
    sinc.validate()?;
    spec.validate()?;
    let rows = sweep::fsamp_sweep(&spec, &cfg, &sinc);
    let header = sweep::header_lines(&spec, &cfg, &sinc, true);
    io::write_text(&a.output, &sweep::render_fsamp_table(&header, &rows))
}

fn load_slice(path: &Path, range: &Option<Range<usize>>) -> Result<Vec<f64>> {
    let file = io::read_samples(path)?;
    match range {
        None => Ok(file.samples),
        Some(r) if r.end <= file.samples.len() => Ok(file.samples[r.clone()].to_vec()),
        Some(r) => Err(sincwarp::Error::RangeOutOfBounds {
            range: r.clone(),
            len: file.samples.len(),
        }
        .into()),
    }
}

pub fn cmd_dtw_matrix(a: &DtwArgs) -> Result<()> {
    let x = load_slice(&a.a, &a.range_a)?;
    let y = load_slice(&a.b, &a.range_b)?;
    let r = sincwarp::dtw(&x, &y)?;

    let mut text = format!(
        "# rows: {}\n# cols: {}\n# distance: {}\n# normalized_distance: {}\n",
        r.rows(),
        r.cols(),
        fmt_f64(r.distance()),
        fmt_f64(r.normalized_distance())
    );
    text.reserve(r.rows() * r.cols() * 20);
    for i in 0..r.rows() {
        let row: Vec<String> = r.cost_row(i).iter().map(|v| fmt_f64(*v)).collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    io::write_text(&a.output, &text)?;

    let mut path_text = String::from("i,j,cost\n");
    for &(i, j) in r.path() {
        path_text.push_str(&format!("{i},{j},{}\n", fmt_f64(r.cost(i, j))));
    }
    let path_out = a
        .path_output
        .clone()
        .unwrap_or_else(|| a.output.with_extension("path.csv"));
    io::write_text(&path_out, &path_text)
}
