//! Signal and zero-list files.

use std::path::Path;

use hardy_core::numerics::{analytic_completion_real, TorusSignal, DEFAULT_GRID_N};
use num_complex::Complex64;

use crate::error::CliError;

pub const GRID_ENV: &str = "UNWIND_GRID_N";

fn open(path: &Path) -> Result<csv::Reader<std::fs::File>, CliError> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn field(record: &csv::StringRecord, i: usize, name: &str, row: usize) -> Result<f64, CliError> {
    let raw = record
        .get(i)
        .ok_or_else(|| CliError::Validation(format!("row {row}: missing field '{name}'")))?;
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(CliError::Validation(format!(
            "row {row}: field '{name}' is not a finite number: {raw:?}"
        ))),
    }
}

/// Reads `index,re,im` (or `index,re` for real signals, which are lifted to
/// `2ℋu - mean`). Rows must be numbered `0..N`.
pub fn read_signal(path: &Path) -> Result<TorusSignal, CliError> {
    let mut reader = open(path)?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?
        .clone();
    let names: Vec<&str> = headers.iter().collect();
    let complex = match names.as_slice() {
        ["index", "re", "im"] => true,
        ["index", "re"] => false,
        _ => {
            return Err(CliError::Validation(format!(
                "{}: header must be 'index,re,im' or 'index,re', got '{}'",
                path.display(),
                names.join(",")
            )))
        }
    };
    let mut re = Vec::new();
    let mut im = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Validation(format!("row {row}: {e}")))?;
        let index = field(&record, 0, "index", row)?;
        if index != row as f64 {
            return Err(CliError::Validation(format!(
                "row {row}: field 'index' is {index}, expected {row}"
            )));
        }
        re.push(field(&record, 1, "re", row)?);
        if complex {
            im.push(field(&record, 2, "im", row)?);
        }
    }
    let signal = if complex {
        TorusSignal::new(re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect())
    } else {
        analytic_completion_real(&re)
    };
    signal.map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// Reads a `re,im` zero list.
pub fn read_zeros(path: &Path) -> Result<Vec<Complex64>, CliError> {
    let mut reader = open(path)?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["re", "im"] {
        return Err(CliError::Validation(format!(
            "{}: header must be 're,im'",
            path.display()
        )));
    }
    reader
        .records()
        .enumerate()
        .map(|(row, record)| {
            let record = record.map_err(|e| CliError::Validation(format!("row {row}: {e}")))?;
            Ok(Complex64::new(
                field(&record, 0, "re", row)?,
                field(&record, 1, "im", row)?,
            ))
        })
        .collect()
}

/// Grid size from the flag, then the environment, then the default.
pub fn grid_size(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var(GRID_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Validation(format!("{GRID_ENV} is not a grid size: {v:?}"))),
        Err(_) => Ok(DEFAULT_GRID_N),
    }
}

/// Reads a signal and brings it to the requested grid by spectral resampling.
pub fn load_signal(path: &Path, grid: Option<usize>) -> Result<TorusSignal, CliError> {
    let signal = read_signal(path)?;
    let n = grid_size(grid)?;
    Ok(signal.resample(n)?)
}

pub fn write_signal_csv(signal: &TorusSignal) -> String {
    let mut out = String::from("index,re,im\n");
    for (k, s) in signal.samples().iter().enumerate() {
        out.push_str(&format!("{k},{},{}\n", s.re, s.im));
    }
    out
}
