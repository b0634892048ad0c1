//! Seeded synthetic tables shaped like the clinical dataset: socio-economic
//! categoricals, psychometric subscale scores, analytical blood values and a
//! binary success outcome.
//!
//! Within each category, columns at even positions (0, 2, 4, ...) form the
//! planted subset. Under [`Signal::Separable`] every planted column separates
//! the classes by a margin; under [`Signal::Noisy`] the planted columns carry
//! an overlapping shift; under [`Signal::None`] nothing depends on the label.
//! Planted columns alternate the direction of their shift.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::schema::{Category, ColumnKind, ColumnSpec};
use super::table::{Column, Table};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Signal {
    Separable,
    Noisy,
    None,
}

/// Feature column count per category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CategoryCounts {
    pub socioeconomic: usize,
    pub psychometric_eq5: usize,
    pub psychometric_salamanca: usize,
    pub psychometric_acta: usize,
    pub psychometric_other: usize,
    pub analytical: usize,
}

impl Default for CategoryCounts {
    /// 70 feature columns in total.
    fn default() -> Self {
        Self {
            socioeconomic: 4,
            psychometric_eq5: 6,
            psychometric_salamanca: 11,
            psychometric_acta: 6,
            psychometric_other: 20,
            analytical: 23,
        }
    }
}

impl CategoryCounts {
    pub fn total(&self) -> usize {
        self.per_category().iter().map(|(_, n)| n).sum()
    }

    fn per_category(&self) -> [(Category, usize); 6] {
        [
            (Category::Socioeconomic, self.socioeconomic),
            (Category::PsychometricEq5, self.psychometric_eq5),
            (Category::PsychometricSalamanca, self.psychometric_salamanca),
            (Category::PsychometricActa, self.psychometric_acta),
            (Category::PsychometricOther, self.psychometric_other),
            (Category::Analytical, self.analytical),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub n_rows: usize,
    #[serde(default)]
    pub n_per_category: CategoryCounts,
    pub positive_rate: f64,
    pub signal: Signal,
}

impl SyntheticSpec {
    /// 73 rows, 70 features, 54.2% positives.
    pub fn clinical_like(seed: u64, signal: Signal) -> Self {
        Self {
            seed,
            n_rows: 73,
            n_per_category: CategoryCounts::default(),
            positive_rate: 0.542,
            signal,
        }
    }
}

const GENDER: &[&str] = &["female", "male"];
const EMPLOYMENT: &[&str] = &["employed", "retired", "student", "unemployed"];
const EDUCATION: &[&str] = &["primary", "secondary", "university"];

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Table> {
    if spec.n_rows < 2 {
        return Err(Error::InvalidArgument("n_rows must be at least 2".into()));
    }
    if !(spec.positive_rate > 0.0 && spec.positive_rate < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "positive_rate must lie in (0, 1), got {}",
            spec.positive_rate
        )));
    }
    let n = spec.n_rows;
    let n_pos = (n as f64 * spec.positive_rate).round() as usize;
    if n_pos == 0 || n_pos == n {
        return Err(Error::InvalidArgument(format!(
            "{n} rows at positive_rate {} leave one class empty",
            spec.positive_rate
        )));
    }
    if spec.n_per_category.total() == 0 {
        return Err(Error::InvalidArgument(
            "no feature columns requested".into(),
        ));
    }

    let mut label_rng = seed::rng(seed::derive(spec.seed, &["labels".into()]));
    let mut labels: Vec<u8> = (0..n).map(|i| u8::from(i < n_pos)).collect();
    labels.shuffle(&mut label_rng);

    let mut schema = Vec::new();
    let mut columns = Vec::new();
    for (category, count) in spec.n_per_category.per_category() {
        for pos in 0..count {
            let mut rng = seed::rng(seed::derive(
                spec.seed,
                &["column".into(), category_tag(category).into(), pos.into()],
            ));
            let planted = pos % 2 == 0;
            let direction = if (pos / 2) % 2 == 0 { 1.0 } else { -1.0 };
            let plan = ColumnPlan {
                signal: if planted { spec.signal } else { Signal::None },
                direction,
            };
            let (spec_col, col) = make_column(category, pos, &plan, &labels, &mut rng);
            schema.push(spec_col);
            columns.push(col);
        }
    }
    schema.push(ColumnSpec::new(
        "success",
        ColumnKind::Binary,
        Category::Outcome,
    ));
    columns.push(Column::Numeric(
        labels.iter().map(|&y| f64::from(y)).collect(),
    ));
    Table::new(schema, columns)
}

fn category_tag(c: Category) -> &'static str {
    match c {
        Category::Socioeconomic => "socio",
        Category::PsychometricEq5 => "eq5",
        Category::PsychometricSalamanca => "salamanca",
        Category::PsychometricActa => "acta",
        Category::PsychometricOther => "psych",
        Category::Analytical => "lab",
        Category::Outcome => "outcome",
    }
}

struct ColumnPlan {
    signal: Signal,
    direction: f64,
}

enum Shape {
    Categorical(&'static [&'static str]),
    Continuous { base: f64, scale: f64 },
    Binary,
}

fn make_column(
    category: Category,
    pos: usize,
    plan: &ColumnPlan,
    labels: &[u8],
    rng: &mut ChaCha8Rng,
) -> (ColumnSpec, Column) {
    let tag = category_tag(category);
    let (name, shape) = match category {
        Category::Socioeconomic => {
            let round = pos / 4;
            let suffix = if round == 0 {
                String::new()
            } else {
                format!("_{}", round + 1)
            };
            match pos % 4 {
                0 => (format!("gender{suffix}"), Shape::Categorical(GENDER)),
                1 => (
                    format!("age{suffix}"),
                    Shape::Continuous {
                        base: 45.0,
                        scale: 10.0,
                    },
                ),
                2 => (
                    format!("employment{suffix}"),
                    Shape::Categorical(EMPLOYMENT),
                ),
                _ => (format!("education{suffix}"), Shape::Categorical(EDUCATION)),
            }
        }
        Category::PsychometricOther if pos == 1 => (format!("{tag}_history"), Shape::Binary),
        Category::Analytical => (
            format!("{tag}_{}", pos + 1),
            Shape::Continuous {
                base: 10.0 + 7.0 * pos as f64,
                scale: 1.0 + (pos % 5) as f64,
            },
        ),
        _ => (
            format!("{tag}_{}", pos + 1),
            Shape::Continuous {
                base: 50.0,
                scale: 10.0,
            },
        ),
    };

    let kind;
    let column = match shape {
        Shape::Continuous { base, scale } => {
            kind = ColumnKind::Continuous;
            Column::Numeric(
                labels
                    .iter()
                    .map(|&y| {
                        let side = plan.direction * if y == 1 { 1.0 } else { -1.0 };
                        let unit = match plan.signal {
                            Signal::Separable => side * (2.0 + 0.5 * rng.random::<f64>()),
                            Signal::Noisy => side * 0.8 + rng.sample::<f64, _>(StandardNormal),
                            Signal::None => rng.sample::<f64, _>(StandardNormal),
                        };
                        round3(base + scale * unit)
                    })
                    .collect(),
            )
        }
        Shape::Binary => {
            kind = ColumnKind::Binary;
            Column::Numeric(
                labels
                    .iter()
                    .map(|&y| {
                        let aligned = if plan.direction > 0.0 { y } else { 1 - y };
                        let bit = match plan.signal {
                            Signal::Separable => aligned,
                            Signal::Noisy => {
                                if rng.random::<f64>() < 0.75 {
                                    aligned
                                } else {
                                    1 - aligned
                                }
                            }
                            Signal::None => u8::from(rng.random::<f64>() < 0.3),
                        };
                        f64::from(bit)
                    })
                    .collect(),
            )
        }
        Shape::Categorical(levels) => {
            kind = ColumnKind::Categorical;
            let half = levels.len().div_ceil(2);
            let (low, high) = levels.split_at(half);
            Column::Text(
                labels
                    .iter()
                    .map(|&y| {
                        let towards_low = (y == 1) == (plan.direction > 0.0);
                        let own = if towards_low { low } else { high };
                        let other = if towards_low { high } else { low };
                        let pool = match plan.signal {
                            Signal::Separable => own,
                            Signal::Noisy if rng.random::<f64>() < 0.75 => own,
                            Signal::Noisy => other,
                            Signal::None => levels,
                        };
                        pool[rng.random_range(0..pool.len())].to_string()
                    })
                    .collect(),
            )
        }
    };
    (ColumnSpec::new(name, kind, category), column)
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}
