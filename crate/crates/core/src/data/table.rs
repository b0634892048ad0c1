use std::io::Write;
use std::path::Path;

use ndarray::Array2;

use super::schema::{validate_schema, Category, ColumnKind, ColumnSpec, Schema};
use crate::error::{Error, Result};

/// Column storage. Categorical columns hold raw strings until encoded.
#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Numeric(Vec<f64>),
    Text(Vec<String>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Text(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_numeric(&self) -> Option<&[f64]> {
        match self {
            Column::Numeric(v) => Some(v),
            Column::Text(_) => None,
        }
    }

    fn take(&self, rows: &[usize]) -> Column {
        match self {
            Column::Numeric(v) => Column::Numeric(rows.iter().map(|&r| v[r]).collect()),
            Column::Text(v) => Column::Text(rows.iter().map(|&r| v[r].clone()).collect()),
        }
    }

    fn cell_string(&self, row: usize) -> String {
        match self {
            Column::Numeric(v) => format_number(v[row]),
            Column::Text(v) => v[row].clone(),
        }
    }
}

/// Shortest representation that parses back to the same `f64`.
fn format_number(x: f64) -> String {
    format!("{x}")
}

/// Rectangular dataset: a validated schema plus one column per spec entry.
///
/// Tables are immutable; every transformation returns a new table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    schema: Vec<ColumnSpec>,
    columns: Vec<Column>,
    n_rows: usize,
}

impl Table {
    pub fn new(schema: Vec<ColumnSpec>, columns: Vec<Column>) -> Result<Self> {
        validate_schema(&schema)?;
        if schema.len() != columns.len() {
            return Err(Error::Shape(format!(
                "{} schema entries but {} columns",
                schema.len(),
                columns.len()
            )));
        }
        let n_rows = columns.first().map_or(0, Column::len);
        for (spec, col) in schema.iter().zip(&columns) {
            if col.len() != n_rows {
                return Err(Error::Shape(format!(
                    "column '{}' has {} rows, expected {}",
                    spec.name,
                    col.len(),
                    n_rows
                )));
            }
            match (spec.kind, col) {
                (ColumnKind::Categorical, _) => {}
                (_, Column::Text(_)) => {
                    return Err(Error::Schema(format!(
                        "column '{}' is {:?} but holds text",
                        spec.name, spec.kind
                    )))
                }
                (kind, Column::Numeric(v)) => {
                    for (row, &x) in v.iter().enumerate() {
                        if !x.is_finite() {
                            return Err(cell_error(row, &spec.name, "value is not finite"));
                        }
                        if kind == ColumnKind::Binary && x != 0.0 && x != 1.0 {
                            return Err(cell_error(row, &spec.name, "binary value must be 0 or 1"));
                        }
                    }
                }
            }
        }
        Ok(Self {
            schema,
            columns,
            n_rows,
        })
    }

    pub fn schema(&self) -> &[ColumnSpec] {
        &self.schema
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, index: usize) -> &Column {
        &self.columns[index]
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.schema.iter().position(|c| c.name == name)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.schema.len()
    }

    pub fn outcome_index(&self) -> usize {
        self.schema
            .iter()
            .position(|c| c.category == Category::Outcome)
            .expect("validated schema has an outcome")
    }

    /// Indices of every non-outcome column, in schema order.
    pub fn feature_indices(&self) -> Vec<usize> {
        let outcome = self.outcome_index();
        (0..self.n_cols()).filter(|&i| i != outcome).collect()
    }

    pub fn feature_names(&self) -> Vec<String> {
        self.feature_indices()
            .into_iter()
            .map(|i| self.schema[i].name.clone())
            .collect()
    }

    /// Outcome labels as class indices (0 = failure, 1 = success).
    pub fn labels(&self) -> Vec<usize> {
        match &self.columns[self.outcome_index()] {
            Column::Numeric(v) => v.iter().map(|&x| x as usize).collect(),
            Column::Text(_) => unreachable!("outcome is validated numeric"),
        }
    }

    pub fn is_encoded(&self) -> bool {
        self.columns.iter().all(|c| matches!(c, Column::Numeric(_)))
    }

    /// New table holding `rows` (in the given order).
    pub fn take_rows(&self, rows: &[usize]) -> Table {
        Table {
            schema: self.schema.clone(),
            columns: self.columns.iter().map(|c| c.take(rows)).collect(),
            n_rows: rows.len(),
        }
    }

    /// New table holding the given columns, which must include the outcome.
    pub fn select_columns(&self, indices: &[usize]) -> Result<Table> {
        let schema = indices.iter().map(|&i| self.schema[i].clone()).collect();
        let columns = indices.iter().map(|&i| self.columns[i].clone()).collect();
        Table::new(schema, columns)
    }

    pub(crate) fn with_columns(&self, columns: Vec<Column>) -> Table {
        debug_assert_eq!(columns.len(), self.columns.len());
        Table {
            schema: self.schema.clone(),
            columns,
            n_rows: self.n_rows,
        }
    }

    /// Feature matrix (rows × non-outcome columns). Fails if any
    /// categorical column is still unencoded.
    pub fn feature_matrix(&self) -> Result<Array2<f64>> {
        let features = self.feature_indices();
        let mut m = Array2::zeros((self.n_rows, features.len()));
        for (j, &c) in features.iter().enumerate() {
            let values = self.columns[c].as_numeric().ok_or_else(|| {
                Error::InvalidArgument(format!("column '{}' is not encoded", self.schema[c].name))
            })?;
            for (i, &x) in values.iter().enumerate() {
                m[[i, j]] = x;
            }
        }
        Ok(m)
    }

    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(self.schema.iter().map(|c| c.name.as_str()))?;
        for row in 0..self.n_rows {
            w.write_record(self.columns.iter().map(|c| c.cell_string(row)))?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn schema_document(&self) -> Schema {
        Schema {
            columns: self.schema.clone(),
        }
    }
}

pub(crate) fn cell_error(row: usize, column: &str, message: impl Into<String>) -> Error {
    Error::Cell {
        row: row + 1,
        column: column.to_string(),
        message: message.into(),
    }
}
