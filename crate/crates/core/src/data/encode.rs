use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::schema::ColumnKind;
use super::table::{Column, Table};
use crate::error::{Error, Result};

/// Per-column label codes. Raw values are sorted lexicographically and
/// numbered from 0.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EncodingMap {
    pub columns: BTreeMap<String, BTreeMap<String, usize>>,
}

impl EncodingMap {
    /// Learn codes from every categorical text column of `t`.
    pub fn fit(t: &Table) -> Self {
        let mut columns = BTreeMap::new();
        for (spec, col) in t.schema().iter().zip(t.columns()) {
            if spec.kind != ColumnKind::Categorical {
                continue;
            }
            if let Column::Text(values) = col {
                let mut distinct: Vec<&str> = values.iter().map(String::as_str).collect();
                distinct.sort_unstable();
                distinct.dedup();
                let codes = distinct
                    .into_iter()
                    .enumerate()
                    .map(|(code, v)| (v.to_string(), code))
                    .collect();
                columns.insert(spec.name.clone(), codes);
            }
        }
        Self { columns }
    }

    /// Replace text with codes. A value not seen during `fit` gets the code
    /// one past the largest known code for its column.
    pub fn apply(&self, t: &Table) -> Result<Table> {
        let mut out = Vec::with_capacity(t.n_cols());
        for (spec, col) in t.schema().iter().zip(t.columns()) {
            match col {
                Column::Text(values) => {
                    let codes = self
                        .columns
                        .get(&spec.name)
                        .ok_or_else(|| Error::MissingColumn(spec.name.clone()))?;
                    let unseen = codes.len() as f64;
                    out.push(Column::Numeric(
                        values
                            .iter()
                            .map(|v| codes.get(v).map_or(unseen, |&c| c as f64))
                            .collect(),
                    ));
                }
                numeric => out.push(numeric.clone()),
            }
        }
        Ok(t.with_columns(out))
    }

    /// Inverse lookup of a code.
    pub fn decode(&self, column: &str, code: usize) -> Option<&str> {
        self.columns
            .get(column)?
            .iter()
            .find(|(_, &c)| c == code)
            .map(|(v, _)| v.as_str())
    }
}

/// Label-encode every categorical column of `t`.
pub fn encode_categoricals(t: &Table) -> (Table, EncodingMap) {
    let map = EncodingMap::fit(t);
    let encoded = map.apply(t).expect("map was fitted on this table");
    (encoded, map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::schema::{Category, ColumnSpec};

    fn table(values: &[&str]) -> Table {
        Table::new(
            vec![
                ColumnSpec::new("level", ColumnKind::Categorical, Category::Socioeconomic),
                ColumnSpec::new("y", ColumnKind::Binary, Category::Outcome),
            ],
            vec![
                Column::Text(values.iter().map(|s| s.to_string()).collect()),
                Column::Numeric(vec![0.0; values.len()]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn lexicographic_codes() {
        let (t, map) = encode_categoricals(&table(&["b", "a", "b"]));
        assert_eq!(t.column(0), &Column::Numeric(vec![1.0, 0.0, 1.0]));
        assert_eq!(map.columns["level"]["a"], 0);
        assert_eq!(map.columns["level"]["b"], 1);
    }

    #[test]
    fn low_mid_high() {
        let (_, map) = encode_categoricals(&table(&["low", "mid", "high"]));
        let codes = &map.columns["level"];
        assert_eq!(codes["high"], 0);
        assert_eq!(codes["low"], 1);
        assert_eq!(codes["mid"], 2);
    }

    #[test]
    fn no_categoricals_is_identity() {
        let t = Table::new(
            vec![
                ColumnSpec::new("x", ColumnKind::Continuous, Category::Analytical),
                ColumnSpec::new("y", ColumnKind::Binary, Category::Outcome),
            ],
            vec![
                Column::Numeric(vec![1.0, 2.0]),
                Column::Numeric(vec![0.0, 1.0]),
            ],
        )
        .unwrap();
        let (out, map) = encode_categoricals(&t);
        assert_eq!(out, t);
        assert!(map.columns.is_empty());
    }

    #[test]
    fn unseen_value_gets_next_code() {
        let map = EncodingMap::fit(&table(&["a", "b"]));
        let out = map.apply(&table(&["c", "a"])).unwrap();
        assert_eq!(out.column(0), &Column::Numeric(vec![2.0, 0.0]));
    }

    #[test]
    fn decode_round_trip() {
        let raw = ["zeta", "alpha", "mu", "alpha"];
        let (t, map) = encode_categoricals(&table(&raw));
        let codes = t.column(0).as_numeric().unwrap();
        for (code, original) in codes.iter().zip(raw) {
            assert_eq!(map.decode("level", *code as usize), Some(original));
        }
    }
}
