//! CSV exchange format: `x,re,im` for sampled functions, `tau,re,im` for spectra.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::TauGrid;
use crate::mellin::{CriticalLineSpectrum, SampledFunction};

const X_HEADER: [&str; 3] = ["x", "re", "im"];
const TAU_HEADER: [&str; 3] = ["tau", "re", "im"];

// `{:e}` prints the shortest representation that parses back to the same bits.
fn fmt(v: f64) -> String {
    format!("{v:e}")
}

fn write_rows<W: Write>(w: W, header: [&str; 3], abscissae: &[f64], values: &[Complex64]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for (a, v) in abscissae.iter().zip(values) {
        out.write_record([fmt(*a), fmt(v.re), fmt(v.im)])?;
    }
    out.flush()?;
    Ok(())
}

fn read_rows<R: Read>(r: R, header: [&str; 3]) -> Result<(Vec<f64>, Vec<Complex64>)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let got = rdr.headers()?.clone();
    if got.iter().ne(header.iter().copied()) {
        return Err(Error::Parse(format!(
            "expected header `{}`, found `{}`",
            header.join(","),
            got.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut abscissae = Vec::new();
    let mut values = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != 3 {
            return Err(Error::Parse(format!("row {}: expected 3 fields, found {}", line + 2, rec.len())));
        }
        let num = |k: usize| -> Result<f64> {
            rec[k]
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("row {}: `{}`: {e}", line + 2, &rec[k])))
        };
        abscissae.push(num(0)?);
        values.push(Complex64::new(num(1)?, num(2)?));
    }
    Ok((abscissae, values))
}

pub fn write_sampled<W: Write>(w: W, f: &SampledFunction) -> Result<()> {
    write_rows(w, X_HEADER, f.x_grid(), f.values())
}

pub fn read_sampled<R: Read>(r: R) -> Result<SampledFunction> {
    let (x, v) = read_rows(r, X_HEADER)?;
    SampledFunction::new(x, v)
}

pub fn write_spectrum<W: Write>(w: W, spec: &CriticalLineSpectrum) -> Result<()> {
    write_rows(w, TAU_HEADER, &spec.grid().taus(), spec.values())
}

/// The τ column must describe a symmetric uniform grid.
pub fn read_spectrum<R: Read>(r: R) -> Result<CriticalLineSpectrum> {
    let (taus, v) = read_rows(r, TAU_HEADER)?;
    CriticalLineSpectrum::new(TauGrid::from_taus(&taus)?, v)
}
