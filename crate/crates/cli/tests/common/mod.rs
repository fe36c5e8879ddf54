#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub fn sincwarp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sincwarp"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn run_ok(args: &[&str]) {
    let out = sincwarp(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

pub fn code(args: &[&str]) -> i32 {
    sincwarp(args).status.code().expect("exited normally")
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Sample values of a trial file, skipping `#` metadata.
pub fn samples(path: &Path) -> Vec<f64> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.trim().parse().unwrap())
        .collect()
}

/// Data rows of a CSV table keyed by its header, skipping `#` lines.
pub fn table(path: &Path) -> Vec<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    lines
        .map(|l| {
            header
                .iter()
                .cloned()
                .zip(l.split(',').map(String::from))
                .collect()
        })
        .collect()
}

pub fn field<'a>(row: &'a [(String, String)], key: &str) -> &'a str {
    &row.iter().find(|(k, _)| k == key).unwrap().1
}

pub fn num(row: &[(String, String)], key: &str) -> f64 {
    field(row, key).parse().unwrap()
}
