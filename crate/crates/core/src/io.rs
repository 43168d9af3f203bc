//! File formats: graph JSON, sample CSV and fit JSON.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::augmented::SampleMatrix;
use crate::error::{Error, Result};
use crate::estimator::{MleFit, RdagParameters};
use crate::graph::ColouredDag;

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Read and validate a graph document.
pub fn load_graph(path: impl AsRef<Path>) -> Result<ColouredDag> {
    ColouredDag::from_json(&read_text(path.as_ref())?)
}

pub fn save_graph(g: &ColouredDag, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, g.to_document().to_json()).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Parse comma-separated samples: one row per vertex, one column per sample,
/// no header.
pub fn parse_samples(text: &str) -> Result<SampleMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record
            .position()
            .map_or(rows.len() + 1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let mut row = Vec::with_capacity(record.len());
        for (c, cell) in record.iter().enumerate() {
            let x: f64 = cell.parse().map_err(|_| Error::NonNumericCell {
                line,
                column: c + 1,
                content: cell.to_string(),
            })?;
            row.push(x);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::RaggedRows {
                    line,
                    expected: first.len(),
                    found: row.len(),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::InvalidSamples("no sample rows found".into()));
    }
    SampleMatrix::from_rows(&rows)
}

/// Read a sample CSV; with `center`, each row has its sample mean removed.
pub fn read_samples(path: impl AsRef<Path>, center: bool) -> Result<SampleMatrix> {
    let y = parse_samples(&read_text(path.as_ref())?)?;
    Ok(if center { y.centred() } else { y })
}

/// Read per-row means, one value per line (a single value applies to all rows).
pub fn read_means(path: impl AsRef<Path>, rows: usize) -> Result<Vec<f64>> {
    let m = parse_samples(&read_text(path.as_ref())?)?;
    let values: Vec<f64> = m.as_matrix().iter().copied().collect();
    match values.len() {
        1 => Ok(vec![values[0]; rows]),
        k if k == rows => Ok(values),
        k => Err(Error::DimensionMismatch {
            expected: rows,
            found: k,
        }),
    }
}

/// Serialised form of a fit. Field order is alphabetical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDocument {
    pub lambda: BTreeMap<String, f64>,
    pub loglik: f64,
    pub omega: BTreeMap<String, f64>,
    pub unique: bool,
}

impl From<&MleFit> for FitDocument {
    fn from(f: &MleFit) -> Self {
        FitDocument {
            lambda: f.lambda.clone(),
            loglik: f.log_likelihood,
            omega: f.omega.clone(),
            unique: f.unique,
        }
    }
}

impl FitDocument {
    pub fn parameters(&self) -> RdagParameters {
        RdagParameters {
            lambda: self.lambda.clone(),
            omega: self.omega.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fit serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
