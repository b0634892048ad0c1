//! Tabular binary classification toolkit.
//!
//! The crate covers the full path from a CSV file (or a seeded synthetic
//! table) to a classifiers × variable-groups matrix of cross-validated f1
//! scores:
//!
//! * [`data`]: schema, ingestion, label encoding, standardization, outcome
//!   labelling, variable groups and synthetic data.
//! * [`resampling`]: random oversampling and SMOTE.
//! * [`classifiers`]: logistic regression, Gaussian and Complement naive
//!   Bayes, k-nearest neighbours and CART-style decision trees.
//! * [`feature_selection`]: ANOVA F scores, k-best selection and
//!   extremely-randomized-trees importances.
//! * [`evaluation`]: confusion matrices, f1, fold plans, leakage-safe
//!   cross-validation, grid search and group aggregation.
//! * [`harness`]: JSON experiment configs, the matrix runner and report
//!   emission used by the `tabclf` binary.

pub mod classifiers;
pub mod data;
pub mod error;
pub mod evaluation;
pub mod feature_selection;
pub mod harness;
pub mod resampling;
pub mod seed;

pub use error::{Error, Result};
