//! Dataset schema, ingestion and preprocessing.

mod encode;
mod groups;
mod label;
mod load;
mod scale;
mod schema;
mod synth;
mod table;

pub use encode::{encode_categoricals, EncodingMap};
pub use groups::{select_group, GroupId, GroupSpec};
pub use label::{label_success, IDEAL_BMI};
pub use load::{load_table, read_table};
pub use scale::{apply_scaler, continuous_columns, fit_scaler, ColumnScale, ScalerParams};
pub use schema::{Category, ColumnKind, ColumnSpec, Schema};
pub use synth::{generate_synthetic, CategoryCounts, Signal, SyntheticSpec};
pub use table::{Column, Table};
