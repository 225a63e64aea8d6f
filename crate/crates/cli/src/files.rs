use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use listedit::BitVector;
use serde::de::DeserializeOwned;
use serde::Serialize;

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// ASCII bitstring, surrounding whitespace ignored.
pub fn read_bits(path: &Path) -> Result<BitVector> {
    let text = read_text(path)?;
    text.trim().parse().with_context(|| format!("parsing bitstring in {}", path.display()))
}

pub fn write_bits(path: &Path, bits: &BitVector) -> Result<()> {
    fs::write(path, format!("{bits}\n")).with_context(|| format!("writing {}", path.display()))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

/// JSON to `out` when given, otherwise to stdout.
pub fn emit(out: Option<&Path>, value: &impl Serialize) -> Result<()> {
    match out {
        Some(p) => write_json(p, value),
        None => print_lines([serde_json::to_string_pretty(value)?]),
    }
}

/// One item per line on stdout. A closed pipe ends output quietly.
pub fn print_lines<I: IntoIterator<Item = T>, T: std::fmt::Display>(lines: I) -> Result<()> {
    let mut out = io::stdout().lock();
    let result = lines.into_iter().try_for_each(|l| writeln!(out, "{l}")).and_then(|_| out.flush());
    match result {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e).context("writing stdout"),
        _ => Ok(()),
    }
}
