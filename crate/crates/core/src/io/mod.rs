//! Dataset ingestion and model persistence.

mod arff;
mod csv;
mod model;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use self::arff::{parse_arff, parse_arff_str};
pub use self::csv::{parse_csv, parse_csv_str};
pub use self::model::{decode, decode_model, encode, encode_model, load_model, save_model, MODEL_MAGIC, MODEL_VERSION};

use crate::error::{Error, Result};
use crate::stream::{AttributeKind, AttributeSpec, LabeledExample, Schema, Value, VecStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DatasetFormat {
    Arff,
    Csv,
}

impl DatasetFormat {
    /// Format implied by a file extension.
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("arff") => Ok(DatasetFormat::Arff),
            Some("csv") => Ok(DatasetFormat::Csv),
            _ => Err(Error::Unknown {
                what: "dataset format",
                name: path.display().to_string(),
            }),
        }
    }
}

/// A fully parsed dataset with its inferred schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetFile {
    pub path: PathBuf,
    pub format: DatasetFormat,
    pub schema: Schema,
    /// Labels of each nominal input attribute, empty for numeric ones.
    pub nominal_labels: Vec<Vec<String>>,
    pub class_labels: Vec<String>,
    pub examples: Vec<LabeledExample>,
}

impl DatasetFile {
    pub fn into_stream(self) -> VecStream {
        VecStream::new(self.schema, self.examples)
    }
}

/// Parses a dataset, choosing the format from the file extension.
/// `class_index` defaults to the last column.
pub fn load_dataset(path: &Path, class_index: Option<usize>) -> Result<DatasetFile> {
    match DatasetFormat::from_path(path)? {
        DatasetFormat::Arff => parse_arff(path, class_index),
        DatasetFormat::Csv => parse_csv(path, class_index),
    }
}

/// Column as declared or inferred, before the class column is split off.
#[derive(Debug, Clone)]
pub(crate) enum Column {
    Nominal { name: String, labels: Vec<String> },
    Numeric { name: String },
}

impl Column {
    fn name(&self) -> &str {
        match self {
            Column::Nominal { name, .. } | Column::Numeric { name } => name,
        }
    }
}

/// Converts string rows into examples given per-column types. Each row comes
/// with the line number used in error messages.
pub(crate) fn assemble(
    path: &Path,
    format: DatasetFormat,
    columns: Vec<Column>,
    rows: Vec<(usize, Vec<String>)>,
    class_index: Option<usize>,
) -> Result<DatasetFile> {
    let display = path.display().to_string();
    if columns.len() < 2 {
        return Err(Error::Parse {
            path: display,
            line: 0,
            message: "need at least one attribute plus the class column".into(),
        });
    }
    let class_index = class_index.unwrap_or(columns.len() - 1);
    let Some(Column::Nominal { labels: class_labels, .. }) = columns.get(class_index).cloned() else {
        return Err(Error::Parse {
            path: display,
            line: 0,
            message: format!("class column {class_index} must exist and be nominal"),
        });
    };
    let mut attributes = Vec::with_capacity(columns.len() - 1);
    let mut nominal_labels = Vec::with_capacity(columns.len() - 1);
    for (i, column) in columns.iter().enumerate() {
        if i == class_index {
            continue;
        }
        match column {
            Column::Nominal { name, labels } => {
                attributes.push(AttributeSpec::nominal(name.clone(), labels.len() as u32));
                nominal_labels.push(labels.clone());
            }
            Column::Numeric { name } => {
                attributes.push(AttributeSpec::numeric(name.clone()));
                nominal_labels.push(Vec::new());
            }
        }
    }
    let schema = Schema::new(attributes, class_labels.len() as u32).map_err(|e| Error::Parse {
        path: display.clone(),
        line: 0,
        message: e.to_string(),
    })?;

    let mut examples = Vec::with_capacity(rows.len());
    for (row_number, (line, fields)) in rows.into_iter().enumerate() {
        let fail = |message: String| Error::Parse {
            path: display.clone(),
            line,
            message: format!("row {}: {message}", row_number + 1),
        };
        if fields.len() != columns.len() {
            return Err(fail(format!("expected {} values, found {}", columns.len(), fields.len())));
        }
        let mut values = Vec::with_capacity(columns.len() - 1);
        let mut label = 0;
        for (i, (column, raw)) in columns.iter().zip(&fields).enumerate() {
            if raw == "?" {
                return Err(fail(format!("missing value for `{}` is not supported", column.name())));
            }
            let value = match column {
                Column::Nominal { name, labels } => {
                    let index = labels
                        .iter()
                        .position(|l| l == raw)
                        .ok_or_else(|| fail(format!("value `{raw}` is not declared for `{name}`")))?;
                    Value::Nominal(index as u32)
                }
                Column::Numeric { name } => {
                    let x: f64 = raw
                        .parse()
                        .map_err(|_| fail(format!("`{raw}` is not a number for `{name}`")))?;
                    if !x.is_finite() {
                        return Err(fail(format!("non-finite value for `{name}`")));
                    }
                    Value::Numeric(x)
                }
            };
            if i == class_index {
                if let Value::Nominal(v) = value {
                    label = v;
                }
            } else {
                values.push(value);
            }
        }
        examples.push(LabeledExample::new(values, label));
    }
    debug_assert!(examples
        .iter()
        .all(|e| crate::stream::validate_example(&schema, e).is_ok()));
    debug_assert!(schema
        .attributes()
        .iter()
        .zip(&nominal_labels)
        .all(|(a, l)| matches!(a.kind, AttributeKind::Numeric) == l.is_empty()));
    Ok(DatasetFile {
        path: path.to_path_buf(),
        format,
        schema,
        nominal_labels,
        class_labels,
        examples,
    })
}
