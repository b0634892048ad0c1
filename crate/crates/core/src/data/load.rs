use std::io::Read;
use std::path::Path;

use super::schema::{validate_schema, ColumnKind, ColumnSpec};
use super::table::{cell_error, Column, Table};
use crate::error::{Error, Result};

/// Read a comma-separated file whose header names match `schema` exactly
/// (same names, same order). Categorical cells stay as raw strings; empty
/// cells are rejected as missing values.
pub fn load_table(path: impl AsRef<Path>, schema: &[ColumnSpec]) -> Result<Table> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_table(file, schema)
}

pub fn read_table(input: impl Read, schema: &[ColumnSpec]) -> Result<Table> {
    validate_schema(schema)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input);

    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let expected: Vec<&str> = schema.iter().map(|c| c.name.as_str()).collect();
    if header != expected {
        let missing: Vec<&str> = expected
            .iter()
            .copied()
            .filter(|n| !header.iter().any(|h| h == n))
            .collect();
        let extra: Vec<&str> = header
            .iter()
            .map(String::as_str)
            .filter(|h| !expected.contains(h))
            .collect();
        return Err(Error::HeaderMismatch(format!(
            "missing {missing:?}, unexpected {extra:?}, expected order {expected:?}"
        )));
    }

    let mut columns: Vec<Column> = schema
        .iter()
        .map(|c| match c.kind {
            ColumnKind::Categorical => Column::Text(Vec::new()),
            _ => Column::Numeric(Vec::new()),
        })
        .collect();

    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != schema.len() {
            return Err(Error::RaggedRow {
                row: row + 1,
                expected: schema.len(),
                found: record.len(),
            });
        }
        for ((spec, col), raw) in schema.iter().zip(columns.iter_mut()).zip(record.iter()) {
            if raw.trim().is_empty() {
                return Err(cell_error(row, &spec.name, "missing value"));
            }
            match col {
                Column::Text(v) => v.push(raw.to_string()),
                Column::Numeric(v) => {
                    let x: f64 = raw.trim().parse().map_err(|_| {
                        cell_error(row, &spec.name, format!("'{raw}' is not a number"))
                    })?;
                    v.push(x);
                }
            }
        }
    }

    Table::new(schema.to_vec(), columns)
}
