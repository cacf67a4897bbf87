use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use stieltjes_lab::io;
use stieltjes_lab::mellin::{CriticalLineSpectrum, SampledFunction};
use stieltjes_lab::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Writes to `path` through a sibling temp file and a rename, or to stdout.
pub fn emit(path: Option<&Path>, body: &[u8]) -> Result<()> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body)?;
            out.flush()?;
        }
        Some(p) => {
            let dir = match p.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating temp file in {}", dir.display()))?;
            tmp.write_all(body)?;
            tmp.as_file().sync_all()?;
            tmp.persist(p).with_context(|| format!("writing {}", p.display()))?;
        }
    }
    Ok(())
}

fn columns(label: &str, abscissae: &[f64], values: &[Complex64]) -> Value {
    json!({
        label: abscissae,
        "re": values.iter().map(|v| v.re).collect::<Vec<_>>(),
        "im": values.iter().map(|v| v.im).collect::<Vec<_>>(),
    })
}

fn to_text<T: Serialize + ?Sized>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

pub fn sampled(f: &SampledFunction, format: Format) -> Result<Vec<u8>> {
    Ok(match format {
        Format::Csv => {
            let mut buf = Vec::new();
            io::write_sampled(&mut buf, f)?;
            buf
        }
        Format::Json => to_text(&columns("x", f.x_grid(), f.values())),
    })
}

pub fn spectrum(s: &CriticalLineSpectrum, format: Format) -> Result<Vec<u8>> {
    Ok(match format {
        Format::Csv => {
            let mut buf = Vec::new();
            io::write_spectrum(&mut buf, s)?;
            buf
        }
        Format::Json => to_text(&columns("tau", &s.grid().taus(), s.values())),
    })
}

/// Pretty JSON in the field order of `T`.
pub fn json<T: Serialize + ?Sized>(v: &T) -> Vec<u8> {
    to_text(v)
}

/// Rows of `header` then records, through the csv writer.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.into_inner().context("flushing table")
}
