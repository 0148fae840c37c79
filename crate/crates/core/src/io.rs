//! CSV ingestion of dissimilarity matrices and point clouds, and plain-text
//! label files (one integer per line).
//!
//! A header row and/or a header column is recognised by a non-numeric first
//! cell and skipped.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::matrix::{DissimilarityMatrix, Metric, PointDataset};

fn is_number(cell: &str) -> bool {
    cell.parse::<f64>().is_ok_and(f64::is_finite)
}

fn numeric_table<R: Read>(reader: R) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::MalformedInput(e.to_string()))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        records.push(rec);
    }
    let Some(first) = records.first() else {
        return Err(Error::MalformedInput("no data rows".into()));
    };
    let skip_row = usize::from(!is_number(first.get(0).unwrap_or("")));
    let data = &records[skip_row..];
    let skip_col = usize::from(data.first().is_some_and(|r| !is_number(r.get(0).unwrap_or(""))));
    data.iter()
        .enumerate()
        .map(|(r, rec)| {
            rec.iter()
                .skip(skip_col)
                .map(|cell| {
                    cell.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| {
                            Error::MalformedInput(format!(
                                "line {}: not a finite number: {cell:?}",
                                r + skip_row + 1
                            ))
                        })
                })
                .collect()
        })
        .collect()
}

/// Square dissimilarity matrix from CSV. Near-symmetric input within
/// `tolerance` is symmetrised.
pub fn parse_dissimilarity<R: Read>(reader: R, tolerance: f64) -> Result<DissimilarityMatrix> {
    let rows = numeric_table(reader)?;
    DissimilarityMatrix::from_rows(&rows, tolerance)
}

/// Point cloud from CSV, one object per row.
pub fn parse_points<R: Read>(reader: R, metric: Metric) -> Result<PointDataset> {
    PointDataset::new(numeric_table(reader)?, metric)
}

/// Integer labels, one per non-blank line.
pub fn parse_labels<R: Read>(reader: R) -> Result<Clustering> {
    let mut labels = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::MalformedInput(e.to_string()))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: i64 = line.parse().map_err(|_| {
            Error::MalformedInput(format!("line {}: not an integer label: {line:?}", i + 1))
        })?;
        labels.push(v);
    }
    Clustering::from_labels(&labels)
}

pub fn write_labels<W: Write>(mut w: W, c: &Clustering) -> std::io::Result<()> {
    for l in c.labels() {
        writeln!(w, "{l}")?;
    }
    Ok(())
}

fn in_file<T>(path: &Path, f: impl FnOnce(File) -> Result<T>) -> Result<T> {
    let wrap = |message: String| Error::Io {
        path: path.display().to_string(),
        message,
    };
    let file = File::open(path).map_err(|e| wrap(e.to_string()))?;
    f(file).map_err(|e| wrap(e.to_string()))
}

pub fn read_dissimilarity(path: &Path, tolerance: f64) -> Result<DissimilarityMatrix> {
    in_file(path, |f| parse_dissimilarity(f, tolerance))
}

pub fn read_points(path: &Path, metric: Metric) -> Result<PointDataset> {
    in_file(path, |f| parse_points(f, metric))
}

/// Reads a label file and checks it labels exactly `n` objects.
pub fn read_labels(path: &Path, n: usize) -> Result<Clustering> {
    in_file(path, |f| {
        let c = parse_labels(f)?;
        if c.n() != n {
            return Err(Error::MalformedInput(format!(
                "{} labels for {n} objects",
                c.n()
            )));
        }
        Ok(c)
    })
}
