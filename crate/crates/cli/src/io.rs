//! Trial files, event sidecars and number formatting.
//!
//! A trial file is plain text: metadata lines start with `#` and carry
//! `key: value` pairs (`# f_samp: 2048` is required), every other non-empty
//! line holds one sample. Events live in a JSON sidecar next to the trial,
//! `trial.csv` pairing with `trial.events.json`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sincwarp::{EventMarker, Trial};

use crate::error::{CliError, Result};

/// Shortest representation that parses back to the same bits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleFile {
    pub f_samp: f64,
    pub samples: Vec<f64>,
}

pub fn parse_samples(text: &str, origin: &str) -> Result<SampleFile> {
    let mut f_samp = None;
    let mut samples = Vec::new();
    for (lineno, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())) {
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            if let Some((key, value)) = meta.split_once(':') {
                if key.trim() == "f_samp" {
                    let v = value.trim().parse::<f64>().map_err(|e| {
                        CliError::Input(format!("{origin}:{lineno}: bad f_samp {value:?}: {e}"))
                    })?;
                    f_samp = Some(v);
                }
            }
            continue;
        }
        let v = line
            .parse::<f64>()
            .map_err(|e| CliError::Input(format!("{origin}:{lineno}: bad sample {line:?}: {e}")))?;
        samples.push(v);
    }
    let f_samp =
        f_samp.ok_or_else(|| CliError::Input(format!("{origin}: missing '# f_samp:' header")))?;
    Ok(SampleFile { f_samp, samples })
}

pub fn read_samples(path: &Path) -> Result<SampleFile> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    parse_samples(&text, &path.display().to_string())
}

pub fn render_trial(t: &Trial, extra_meta: &[(String, String)]) -> String {
    let mut out = String::with_capacity(t.len() * 22);
    out.push_str(&format!("# f_samp: {}\n", fmt_f64(t.f_samp())));
    for (k, v) in extra_meta {
        out.push_str(&format!("# {k}: {v}\n"));
    }
    for v in t.samples() {
        out.push_str(&fmt_f64(*v));
        out.push('\n');
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = fs::File::create(path).map_err(CliError::io(path))?;
    f.write_all(text.as_bytes()).map_err(CliError::io(path))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRecord {
    pub index: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventsFile {
    pub events: Vec<EventRecord>,
}

impl EventsFile {
    pub fn from_markers(events: &[EventMarker]) -> Self {
        Self {
            events: events
                .iter()
                .map(|e| EventRecord {
                    index: e.index,
                    label: e.label.clone(),
                })
                .collect(),
        }
    }

    pub fn into_markers(self) -> Vec<EventMarker> {
        self.events
            .into_iter()
            .map(|e| EventMarker::new(e.index, e.label))
            .collect()
    }
}

/// `dir/name.csv` -> `dir/name.events.json`.
pub fn sidecar_path(trial_path: &Path) -> PathBuf {
    trial_path.with_extension("events.json")
}

pub fn read_events(path: &Path) -> Result<Vec<EventMarker>> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    let file: EventsFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(file.into_markers())
}

pub fn write_events(path: &Path, events: &[EventMarker]) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&EventsFile::from_markers(events))
        .expect("event records always serialize");
    text.push('\n');
    write_text(path, &text)
}

/// Read a trial file plus its events.
pub fn read_trial(path: &Path, events: Vec<EventMarker>) -> Result<Trial> {
    let file = read_samples(path)?;
    Ok(Trial::new(file.samples, file.f_samp, events)?)
}

pub fn write_trial(path: &Path, t: &Trial, extra_meta: &[(String, String)]) -> Result<()> {
    write_text(path, &render_trial(t, extra_meta))
}
