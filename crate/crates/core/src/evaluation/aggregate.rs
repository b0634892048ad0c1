//! Classifier × group score matrices and their per-group roll-up.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Marker written for a cell whose pipeline failed.
pub const FAIL_MARKER: &str = "FAIL";

/// Mean f1 per (classifier, group). `None` marks a failed cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrix {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub cells: Vec<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub group: String,
    pub mean: f64,
    /// Population standard deviation (divides by N).
    pub sd: f64,
    pub n: usize,
}

/// Mean and population SD of one column. Errors on an empty column.
pub fn mean_sd(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot aggregate an empty column".into(),
        ));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Ok((mean, var.sqrt()))
}

impl ScoreMatrix {
    pub fn new(rows: Vec<String>, cols: Vec<String>) -> Self {
        let cells = vec![vec![None; cols.len()]; rows.len()];
        Self { rows, cols, cells }
    }

    pub fn column(&self, j: usize) -> Vec<Option<f64>> {
        self.cells.iter().map(|r| r[j]).collect()
    }

    /// Column index of each row's best score. Ties go to the first column.
    pub fn best_groups(&self) -> Vec<Option<usize>> {
        self.cells
            .iter()
            .map(|row| {
                let mut best: Option<(usize, f64)> = None;
                for (j, v) in row.iter().enumerate() {
                    if let Some(v) = *v {
                        if best.is_none_or(|(_, b)| v > b) {
                            best = Some((j, v));
                        }
                    }
                }
                best.map(|(j, _)| j)
            })
            .collect()
    }

    /// Header `classifier,<groups..>,best_group`; 3-decimal cells.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["classifier".to_string()];
        header.extend(self.cols.iter().cloned());
        header.push("best_group".into());
        w.write_record(&header)?;
        for (i, (name, row)) in self.rows.iter().zip(&self.cells).enumerate() {
            let mut rec = vec![name.clone()];
            rec.extend(row.iter().map(|c| match c {
                Some(v) => format!("{v:.3}"),
                None => FAIL_MARKER.to_string(),
            }));
            rec.push(
                self.best_groups()[i]
                    .map(|j| self.cols[j].clone())
                    .unwrap_or_default(),
            );
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    /// Inverse of [`ScoreMatrix::write_csv`]. A trailing `best_group` column
    /// is ignored; empty and `FAIL` cells read as missing.
    pub fn read_csv(input: impl Read) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().flexible(true).from_reader(input);
        let header = r.headers()?.clone();
        let mut cols: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let has_best = cols.last().is_some_and(|c| c == "best_group");
        if has_best {
            cols.pop();
        }
        if header.get(0) != Some("classifier") || cols.is_empty() {
            return Err(Error::HeaderMismatch(
                "expected 'classifier' followed by at least one group column".into(),
            ));
        }
        let mut m = ScoreMatrix::new(Vec::new(), cols);
        let expected = m.cols.len() + 1 + has_best as usize;
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            if rec.len() != expected {
                return Err(Error::RaggedRow {
                    row: i + 1,
                    expected,
                    found: rec.len(),
                });
            }
            m.rows.push(rec[0].to_string());
            let mut row = Vec::with_capacity(m.cols.len());
            for (j, cell) in rec.iter().skip(1).take(m.cols.len()).enumerate() {
                let cell = cell.trim();
                row.push(if cell.is_empty() || cell == FAIL_MARKER {
                    None
                } else {
                    Some(cell.parse::<f64>().map_err(|_| Error::Cell {
                        row: i + 1,
                        column: m.cols[j].clone(),
                        message: format!("'{cell}' is not a number"),
                    })?)
                });
            }
            m.cells.push(row);
        }
        Ok(m)
    }

    pub fn read_csv_file(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(f)
    }
}

/// Per-group mean and population SD over every classifier row. A column with
/// any failed cell is an error: the roll-up needs complete columns.
pub fn aggregate_group_stats(m: &ScoreMatrix) -> Result<Vec<GroupStats>> {
    (0..m.cols.len())
        .map(|j| {
            let col = m.column(j);
            let values: Option<Vec<f64>> = col.iter().copied().collect();
            let values = values.ok_or_else(|| {
                Error::InvalidArgument(format!("group {} has failed cells", m.cols[j]))
            })?;
            let (mean, sd) = mean_sd(&values)?;
            Ok(GroupStats {
                group: m.cols[j].clone(),
                mean,
                sd,
                n: values.len(),
            })
        })
        .collect()
}
