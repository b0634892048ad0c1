use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Categorical,
    Continuous,
    Binary,
}

/// Variable family a column belongs to. Variable groups are unions of these.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Socioeconomic,
    PsychometricEq5,
    PsychometricSalamanca,
    PsychometricActa,
    PsychometricOther,
    Analytical,
    Outcome,
}

impl Category {
    pub const FEATURE_CATEGORIES: [Category; 6] = [
        Category::Socioeconomic,
        Category::PsychometricEq5,
        Category::PsychometricSalamanca,
        Category::PsychometricActa,
        Category::PsychometricOther,
        Category::Analytical,
    ];

    pub fn is_psychometric(self) -> bool {
        matches!(
            self,
            Category::PsychometricEq5
                | Category::PsychometricSalamanca
                | Category::PsychometricActa
                | Category::PsychometricOther
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
    pub category: Category,
}

impl ColumnSpec {
    pub fn new(name: impl Into<String>, kind: ColumnKind, category: Category) -> Self {
        Self {
            name: name.into(),
            kind,
            category,
        }
    }
}

/// JSON sidecar: `{"columns": [{"name": .., "kind": .., "category": ..}, ..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    pub columns: Vec<ColumnSpec>,
}

impl Schema {
    pub fn new(columns: Vec<ColumnSpec>) -> Result<Self> {
        validate_schema(&columns)?;
        Ok(Self { columns })
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let schema: Schema = serde_json::from_str(&text)?;
        validate_schema(&schema.columns)?;
        Ok(schema)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }
}

pub(crate) fn validate_schema(columns: &[ColumnSpec]) -> Result<()> {
    let mut seen = HashSet::new();
    for c in columns {
        if !seen.insert(c.name.as_str()) {
            return Err(Error::Schema(format!("duplicate column name '{}'", c.name)));
        }
    }
    let outcomes: Vec<&ColumnSpec> = columns
        .iter()
        .filter(|c| c.category == Category::Outcome)
        .collect();
    match outcomes.as_slice() {
        [one] if one.kind == ColumnKind::Binary => Ok(()),
        [one] => Err(Error::Schema(format!(
            "outcome column '{}' must be binary",
            one.name
        ))),
        [] => Err(Error::Schema("no outcome column".into())),
        many => Err(Error::Schema(format!(
            "expected exactly one outcome column, found {}",
            many.len()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_and_missing_outcome() {
        let dup = vec![
            ColumnSpec::new("a", ColumnKind::Continuous, Category::Analytical),
            ColumnSpec::new("a", ColumnKind::Binary, Category::Outcome),
        ];
        assert!(matches!(Schema::new(dup), Err(Error::Schema(_))));
        let none = vec![ColumnSpec::new(
            "a",
            ColumnKind::Continuous,
            Category::Analytical,
        )];
        assert!(Schema::new(none).is_err());
        let not_binary = vec![ColumnSpec::new(
            "y",
            ColumnKind::Continuous,
            Category::Outcome,
        )];
        assert!(Schema::new(not_binary).is_err());
    }

    #[test]
    fn json_field_names() {
        let s = Schema::new(vec![
            ColumnSpec::new("hb", ColumnKind::Continuous, Category::Analytical),
            ColumnSpec::new("success", ColumnKind::Binary, Category::Outcome),
        ])
        .unwrap();
        let text = s.to_json_string();
        assert!(text.contains("\"kind\": \"continuous\""));
        assert!(text.contains("\"category\": \"outcome\""));
        let back: Schema = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }
}
