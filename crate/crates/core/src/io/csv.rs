//! Headered CSV with inferred column types.
//!
//! A column is numeric when every value parses as a finite number; otherwise
//! it is nominal with labels in order of first appearance. The class column
//! is always nominal.

use std::path::Path;

use super::{assemble, Column, DatasetFile, DatasetFormat};
use crate::error::{Error, Result};

pub fn parse_csv(path: &Path, class_index: Option<usize>) -> Result<DatasetFile> {
    let text = std::fs::read_to_string(path)?;
    parse_csv_str(&text, path, class_index)
}

/// Parses CSV text; `path` is used for error messages only.
pub fn parse_csv_str(text: &str, path: &Path, class_index: Option<usize>) -> Result<DatasetFile> {
    let fail = |line: usize, message: String| Error::Parse {
        path: path.display().to_string(),
        line,
        message,
    };
    let mut reader = ::csv::ReaderBuilder::new()
        .trim(::csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let names: Vec<String> = reader
        .headers()
        .map_err(|e| fail(1, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| fail(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        rows.push((line, record.iter().map(str::to_string).collect::<Vec<_>>()));
    }
    let class_index = class_index.unwrap_or(names.len().saturating_sub(1));
    let columns = names
        .into_iter()
        .enumerate()
        .map(|(i, name)| {
            let cells = rows.iter().filter_map(|(_, r)| r.get(i));
            let numeric = i != class_index
                && rows.iter().all(|(_, r)| r.get(i).is_some_and(|v| v.parse::<f64>().is_ok_and(f64::is_finite)));
            if numeric {
                Column::Numeric { name }
            } else {
                let mut labels: Vec<String> = Vec::new();
                for cell in cells {
                    if cell != "?" && !labels.contains(cell) {
                        labels.push(cell.clone());
                    }
                }
                Column::Nominal { name, labels }
            }
        })
        .collect();
    assemble(path, DatasetFormat::Csv, columns, rows, Some(class_index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::{AttributeKind, Value};

    #[test]
    fn infers_types_and_first_appearance_order() {
        let text = "colour,size,label\nred,1.5,b\nblue,2,a\nred,-3e2,b\n";
        let d = parse_csv_str(text, Path::new("t.csv"), None).unwrap();
        assert_eq!(d.schema.kind(0), AttributeKind::Nominal { value_count: 2 });
        assert_eq!(d.schema.kind(1), AttributeKind::Numeric);
        assert_eq!(d.class_labels, ["b", "a"]);
        assert_eq!(d.examples[2].instance.values[1], Value::Numeric(-300.0));
        assert_eq!(d.examples[1].label, 1);
    }

    #[test]
    fn class_column_override() {
        let text = "label,x\nyes,1\nno,2\n";
        let d = parse_csv_str(text, Path::new("t.csv"), Some(0)).unwrap();
        assert_eq!(d.schema.attribute_count(), 1);
        assert_eq!(d.class_labels, ["yes", "no"]);
    }

    #[test]
    fn ragged_row_is_an_error() {
        let text = "a,b\n1,x\n2\n";
        assert!(parse_csv_str(text, Path::new("t.csv"), None).is_err());
    }
}
