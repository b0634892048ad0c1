use serde::{Deserialize, Serialize};

use super::schema::ColumnKind;
use super::table::{Column, Table};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnScale {
    pub name: String,
    pub center: f64,
    /// Sample standard deviation (n − 1). Zero means the column is passed
    /// through unscaled.
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScalerParams {
    pub columns: Vec<ColumnScale>,
}

/// Names of the continuous columns of `t`, in schema order.
pub fn continuous_columns(t: &Table) -> Vec<String> {
    t.schema()
        .iter()
        .filter(|c| c.kind == ColumnKind::Continuous)
        .map(|c| c.name.clone())
        .collect()
}

/// Learn per-column mean and sample standard deviation.
pub fn fit_scaler(t: &Table, columns: &[String]) -> Result<ScalerParams> {
    if t.n_rows() == 0 {
        return Err(Error::InvalidArgument(
            "cannot fit a scaler on zero rows".into(),
        ));
    }
    let mut out = Vec::with_capacity(columns.len());
    for name in columns {
        let idx = t
            .column_index(name)
            .ok_or_else(|| Error::MissingColumn(name.clone()))?;
        let values = t
            .column(idx)
            .as_numeric()
            .ok_or_else(|| Error::InvalidArgument(format!("column '{name}' is not numeric")))?;
        let n = values.len() as f64;
        let center = values.iter().sum::<f64>() / n;
        let spread = if values.len() > 1 {
            let ss: f64 = values.iter().map(|x| (x - center).powi(2)).sum();
            (ss / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        out.push(ColumnScale {
            name: name.clone(),
            center,
            spread,
        });
    }
    Ok(ScalerParams { columns: out })
}

/// Standardize the fitted columns of `t` with previously fitted params.
pub fn apply_scaler(t: &Table, params: &ScalerParams) -> Result<Table> {
    let mut columns = t.columns().to_vec();
    for scale in &params.columns {
        let idx = t
            .column_index(&scale.name)
            .ok_or_else(|| Error::MissingColumn(scale.name.clone()))?;
        if scale.spread == 0.0 {
            continue;
        }
        let values = t.column(idx).as_numeric().ok_or_else(|| {
            Error::InvalidArgument(format!("column '{}' is not numeric", scale.name))
        })?;
        columns[idx] = Column::Numeric(
            values
                .iter()
                .map(|x| (x - scale.center) / scale.spread)
                .collect(),
        );
    }
    Ok(t.with_columns(columns))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::schema::{Category, ColumnSpec};

    fn table(x: &[f64]) -> Table {
        Table::new(
            vec![
                ColumnSpec::new("x", ColumnKind::Continuous, Category::Analytical),
                ColumnSpec::new("y", ColumnKind::Binary, Category::Outcome),
            ],
            vec![
                Column::Numeric(x.to_vec()),
                Column::Numeric(vec![0.0; x.len()]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn two_four_six() {
        let t = table(&[2.0, 4.0, 6.0]);
        let p = fit_scaler(&t, &continuous_columns(&t)).unwrap();
        assert_eq!(p.columns[0].center, 4.0);
        assert_eq!(p.columns[0].spread, 2.0);
        let s = apply_scaler(&t, &p).unwrap();
        assert_eq!(s.column(0), &Column::Numeric(vec![-1.0, 0.0, 1.0]));
    }

    #[test]
    fn constant_column_passes_through() {
        let t = table(&[5.0, 5.0, 5.0]);
        let p = fit_scaler(&t, &["x".to_string()]).unwrap();
        assert_eq!(p.columns[0].spread, 0.0);
        assert_eq!(apply_scaler(&t, &p).unwrap(), t);
    }

    #[test]
    fn uses_fitted_statistics_on_other_tables() {
        let fold_a = table(&[0.0, 2.0]);
        let fold_b = table(&[10.0, 30.0]);
        let p = fit_scaler(&fold_a, &["x".to_string()]).unwrap();
        let s = apply_scaler(&fold_b, &p).unwrap();
        let sqrt2 = 2f64.sqrt();
        let expected = [(10.0 - 1.0) / sqrt2, (30.0 - 1.0) / sqrt2];
        assert_eq!(s.column(0).as_numeric().unwrap(), &expected);
    }

    #[test]
    fn missing_fitted_column() {
        let p = ScalerParams {
            columns: vec![ColumnScale {
                name: "absent".into(),
                center: 0.0,
                spread: 1.0,
            }],
        };
        assert!(matches!(
            apply_scaler(&table(&[1.0]), &p),
            Err(Error::MissingColumn(_))
        ));
    }

    #[test]
    fn empty_table_rejected() {
        assert!(fit_scaler(&table(&[]), &["x".to_string()]).is_err());
    }
}
