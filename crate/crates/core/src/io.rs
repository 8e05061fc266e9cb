//! CSV readers and writers for spectra, correlation traces and visibility
//! curves.
//!
//! Every file has a header row; lines starting with `#` are ignored. The first
//! column name fixes the abscissa and its unit (`energy_ueV`, `tau_ps`,
//! `detuning_ueV`); the second column name is free. Numbers are written in
//! shortest round-trip form, so reading back a written file is lossless.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::correlation::CorrelationTrace;
use crate::lineshape::Spectrum;
use crate::visibility::VisibilityCurve;
use crate::{Error, Result};

pub const ENERGY_COLUMN: &str = "energy_ueV";
pub const TAU_COLUMN: &str = "tau_ps";
pub const DETUNING_COLUMN: &str = "detuning_ueV";

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input)
}

/// Reads a two-column numeric table whose first header is `x_name`.
pub fn read_xy<R: Read>(input: R, x_name: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rdr = reader(input);
    let headers = rdr.headers()?.clone();
    if headers.len() != 2 {
        return Err(Error::Parse(format!(
            "expected 2 columns, header has {}",
            headers.len()
        )));
    }
    if &headers[0] != x_name {
        return Err(Error::Parse(format!(
            "first column is `{}`, expected `{x_name}`",
            &headers[0]
        )));
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != 2 {
            return Err(Error::Parse(format!("row {}: expected 2 fields", row + 1)));
        }
        let num = |i: usize| {
            record[i]
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("row {}: `{}`: {e}", row + 1, &record[i])))
        };
        xs.push(num(0)?);
        ys.push(num(1)?);
    }
    Ok((xs, ys))
}

/// Writes named columns of equal length.
pub fn write_columns<W: Write>(output: W, names: &[&str], columns: &[&[f64]]) -> Result<()> {
    debug_assert_eq!(names.len(), columns.len());
    let rows = columns.first().map_or(0, |c| c.len());
    if columns.iter().any(|c| c.len() != rows) {
        return Err(Error::InvalidParameter("columns differ in length".into()));
    }
    let mut wtr = csv::Writer::from_writer(output);
    wtr.write_record(names)?;
    let mut buf = Vec::with_capacity(columns.len());
    for i in 0..rows {
        buf.clear();
        buf.extend(columns.iter().map(|c| c[i].to_string()));
        wtr.write_record(&buf)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_spectrum<R: Read>(input: R) -> Result<Spectrum> {
    let (x, y) = read_xy(input, ENERGY_COLUMN)?;
    Spectrum::new(x, y)
}

pub fn write_spectrum<W: Write>(output: W, spec: &Spectrum) -> Result<()> {
    write_columns(
        output,
        &[ENERGY_COLUMN, "intensity"],
        &[spec.energies(), spec.intensities()],
    )
}

pub fn read_trace<R: Read>(input: R) -> Result<CorrelationTrace> {
    let (x, y) = read_xy(input, TAU_COLUMN)?;
    CorrelationTrace::new(x, y)
}

/// `value_name` is `g2` for normalised traces and `counts` for histograms.
pub fn write_trace<W: Write>(output: W, trace: &CorrelationTrace, value_name: &str) -> Result<()> {
    write_columns(output, &[TAU_COLUMN, value_name], &[trace.taus(), trace.values()])
}

pub fn read_curve<R: Read>(input: R) -> Result<VisibilityCurve> {
    let (x, y) = read_xy(input, DETUNING_COLUMN)?;
    VisibilityCurve::new(x, y)
}

pub fn write_curve<W: Write>(output: W, curve: &VisibilityCurve) -> Result<()> {
    write_columns(
        output,
        &[DETUNING_COLUMN, "visibility"],
        &[curve.detunings(), curve.visibilities()],
    )
}

pub fn read_spectrum_file(path: impl AsRef<Path>) -> Result<Spectrum> {
    read_spectrum(File::open(path)?)
}

pub fn read_trace_file(path: impl AsRef<Path>) -> Result<CorrelationTrace> {
    read_trace(File::open(path)?)
}

pub fn read_curve_file(path: impl AsRef<Path>) -> Result<VisibilityCurve> {
    read_curve(File::open(path)?)
}
